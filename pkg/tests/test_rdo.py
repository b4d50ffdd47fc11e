from dataclasses import dataclass

import numpy as np
import pytest

from liftcodec import rdo
from liftcodec.coding import entropy
from liftcodec.core import Frame, split
from liftcodec.denoise import DenoiserKind
from liftcodec.lifting import DenoiseHooks, analyze
from liftcodec.motion import estimate_motion, zero_field

from conftest import noisy_phantom


@dataclass(frozen=True)
class FakePoint:
    xi_p: int
    xi_u: int
    cost: float


def surface(fn):
    def cost(p, u):
        return FakePoint(p, u, float(fn(p, u)))

    return cost


class TestLambdaSchedule:
    def test_exact_values(self):
        for n in range(8):
            assert rdo.lambda_schedule(n) == 0.05 * 3**n
        assert rdo.lambda_schedule(0) == 0.05
        assert rdo.lambda_schedule(1) == pytest.approx(0.15, abs=1e-15)
        assert rdo.lambda_schedule(7) == pytest.approx(109.35, abs=1e-10)

    def test_out_of_range(self):
        for n in (-1, 8, 100):
            with pytest.raises(ValueError):
                rdo.lambda_schedule(n)


class TestRingGeometry:
    def test_ring_points(self):
        assert rdo.ring_points(0) == [(0, 0)]
        assert sorted(rdo.ring_points(1)) == [(0, 1), (1, 0), (1, 1)]
        ring3 = rdo.ring_points(3)
        assert len(ring3) == 7
        assert all(max(p, u) == 3 for p, u in ring3)

    def test_rings_cover_grid(self):
        seen = set()
        for i in range(5):
            seen.update(rdo.ring_points(i))
        assert seen == {(p, u) for p in range(5) for u in range(5)}


class TestRingMinimize:
    def test_increasing_surface_stops_after_two_rings(self):
        result = rdo.ring_minimize(surface(lambda p, u: 1.0 + p + u), xi_max=50)
        assert (result.chosen.xi_p, result.chosen.xi_u) == (0, 0)
        assert result.iterations == 2
        assert len(result.evaluated) == 4  # ring 0 plus ring 1

    def test_unimodal_finds_minimum(self):
        fn = surface(lambda p, u: (p - 3) ** 2 + (u - 2) ** 2)
        result = rdo.ring_minimize(fn, xi_max=20)
        assert (result.chosen.xi_p, result.chosen.xi_u) == (3, 2)
        brute = min(
            (fn(p, u) for p in range(21) for u in range(21)), key=lambda pt: pt.cost
        )
        assert result.chosen.cost == brute.cost

    def test_plateau_keeps_searching(self):
        result = rdo.ring_minimize(surface(lambda p, u: 1.0), xi_max=6)
        assert result.iterations == 7  # ties never stop the search
        assert (result.chosen.xi_p, result.chosen.xi_u) == (0, 0)

    def test_tie_break_smaller_sum_then_smaller_u(self):
        # flat ring-1 costs: (0,0) worse, ring 1 all equal
        def fn(p, u):
            return 5.0 if (p, u) == (0, 0) else 1.0

        result = rdo.ring_minimize(surface(fn), xi_max=8)
        assert (result.chosen.xi_p, result.chosen.xi_u) == (1, 0)

    def test_chosen_is_global_min_of_evaluated(self):
        rng = np.random.default_rng(0)
        table = rng.random((12, 12))

        result = rdo.ring_minimize(surface(lambda p, u: table[p, u]), xi_max=11)
        best = min(result.evaluated, key=lambda pt: (pt.cost, pt.xi_p + pt.xi_u, pt.xi_u))
        assert result.chosen == best


@pytest.fixture(scope="module")
def pair():
    seq = noisy_phantom(seed=3, w=32, h=32, t=2, sigma=8.0, radius=1)
    odd, even = split(seq)
    mv = estimate_motion(odd.frames[0], even.frames[0])
    return odd.frames[0], even.frames[0], mv


class TestEvaluateCost:

    def test_zero_xi_matches_plain_baseline(self, pair):
        odd, even, mv = pair
        pt = rdo.evaluate_cost(odd, even, mv, 0, 0, DenoiserKind.GAUSSIAN, lam=1.0)
        base = analyze(odd, even, mv, DenoiseHooks.off())
        rate = (
            len(entropy.encode_frame_payload(base.lp.data))
            + len(entropy.encode_frame_payload(base.hp.data))
            + len(entropy.encode_mv(mv))
        )
        dist = rdo.lowpass_distortion(base.lp.data, odd.data, even.data)
        assert pt.rate == rate
        assert pt.distortion == pytest.approx(dist)
        assert pt.cost == pytest.approx(dist + 1.0 * rate)

    def test_constant_pair_zero_distortion(self):
        c = 1200
        odd = Frame(np.full((16, 16), c, dtype=np.int32))
        even = Frame(np.full((16, 16), c, dtype=np.int32))
        pt = rdo.evaluate_cost(odd, even, zero_field(16, 16), 0, 0, lam=0.5)
        assert pt.distortion == 0.0

    def test_lambda_zero_like_choice_minimizes_distortion(self, pair):
        odd, even, mv = pair
        # tiny lambda: the chosen point must match the distortion argmin
        # over the evaluated set
        result = rdo.ring_search(odd, even, mv, DenoiserKind.GAUSSIAN, lam=1e-9, xi_max=6)
        best_d = min(result.evaluated, key=lambda pt: (pt.distortion, pt.xi_p + pt.xi_u, pt.xi_u))
        assert result.chosen.distortion == pytest.approx(best_d.distortion, rel=1e-12)

    def test_cost_scaling_invariance(self, pair):
        odd, even, mv = pair
        ev = rdo.PairEvaluator(odd, even, mv, DenoiserKind.GAUSSIAN, lam=2.0)
        pts = [ev.evaluate(p, u) for p in range(4) for u in range(4)]
        argmin_plain = min(pts, key=lambda pt: pt.distortion + 2.0 * pt.rate)
        argmin_scaled = min(pts, key=lambda pt: 7.0 * pt.distortion + 2.0 * 7.0 * pt.rate)
        assert (argmin_plain.xi_p, argmin_plain.xi_u) == (argmin_scaled.xi_p, argmin_scaled.xi_u)


class TestRingSearchOnRealPairs:
    def test_matches_exhaustive_on_phantom(self):
        seq = noisy_phantom(seed=8, w=32, h=32, t=4, sigma=10.0, radius=2)
        odd, even = split(seq)
        hits = 0
        for t in range(odd.T):
            mv = estimate_motion(odd.frames[t], even.frames[t])
            ev = rdo.PairEvaluator(odd.frames[t], even.frames[t], mv, DenoiserKind.GAUSSIAN, lam=1.0)
            result = rdo.ring_search(
                odd.frames[t], even.frames[t], mv, DenoiserKind.GAUSSIAN, lam=1.0,
                xi_max=8, evaluator=ev,
            )
            grid_min = min(
                ev.evaluate(p, u).cost for p in range(9) for u in range(9)
            )
            if result.chosen.cost <= grid_min * 1.001:
                hits += 1
        assert hits >= odd.T - 1

    def test_encode_sequence_rdo_records_choices(self):
        seq = noisy_phantom(seed=2, w=32, h=32, t=4, sigma=6.0)
        out = rdo.encode_sequence_rdo(seq, lam=0.5, xi_max=4)
        assert len(out) == 2
        for pair, result in out:
            assert (pair.xi_p, pair.xi_u) == (result.chosen.xi_p, result.chosen.xi_u)
            assert result.chosen.cost == min(pt.cost for pt in result.evaluated)

    def test_noiseless_static_phantom_chooses_zero(self):
        # odd == even exactly: every filter strength degenerates to the
        # identity, the surface is one big plateau, and the search runs to
        # the cap before the tie-break lands on the origin
        seq = noisy_phantom(seed=4, w=32, h=32, t=2, sigma=0.0, motion=(0, 0))
        out = rdo.encode_sequence_rdo(seq, lam=rdo.lambda_schedule(0), xi_max=6)
        for pair, result in out:
            assert (pair.xi_p, pair.xi_u) == (0, 0)
            assert result.iterations == 7  # plateau never stops early

    def test_cost_table_csv(self, tmp_path):
        seq = noisy_phantom(seed=2, w=16, h=16, t=2, sigma=4.0)
        out = rdo.encode_sequence_rdo(seq, lam=1.0, xi_max=2)
        path = tmp_path / "table.csv"
        rdo.write_cost_tables(path, [r for _, r in out])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "pair,xi_p,xi_u,distortion,rate_bytes,cost"
        assert len(lines) == 1 + sum(len(r.evaluated) for _, r in out)
