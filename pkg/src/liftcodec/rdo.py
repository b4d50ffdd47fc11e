"""Lagrangian selection of per-lifting-step filter strengths.

For one frame pair, a candidate (xi_p, xi_u) is scored as

    C = D + lambda * R

where D is the mean squared error of the lowpass frame against *both* source
frames and R is the actual compressed byte count of lowpass + highpass +
motion payloads (no rate model — the exact coder runs for every candidate).

The search walks L-shaped rings max(xi_p, xi_u) = 0, 1, 2, ... of the
parameter grid, keeps the cheapest point seen, and stops as soon as a ring's
best cost exceeds the running minimum; plateaus (ties) keep it going. The
encoder-facing lambda values follow the geometric schedule 0.05 * 3^n.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import lifting, motion
from .coding import entropy
from .core import Frame
from .denoise import KG_DEFAULT, DenoiserKind
from .motion import MotionField

LAMBDA_BASE = 0.05
LAMBDA_FACTOR = 3
LAMBDA_STEPS = 8
XI_MAX_DEFAULT = 100


def lambda_schedule(n: int) -> float:
    """lambda_n = 0.05 * 3^n for n in 0..7."""
    if not 0 <= n < LAMBDA_STEPS:
        raise ValueError(f"lambda index {n} outside 0..{LAMBDA_STEPS - 1}")
    return LAMBDA_BASE * LAMBDA_FACTOR**n


@dataclass(frozen=True)
class LagrangeParams:
    lam: float
    index: int | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    @classmethod
    def from_index(cls, n: int) -> "LagrangeParams":
        return cls(lambda_schedule(n), n)


@dataclass(frozen=True)
class CostPoint:
    xi_p: int
    xi_u: int
    distortion: float
    rate: int  # bytes: lowpass + highpass + motion payloads
    cost: float


@dataclass
class RingSearchResult:
    chosen: CostPoint
    evaluated: list[CostPoint] = field(default_factory=list)
    iterations: int = 0  # rings evaluated


def lowpass_distortion(lp: np.ndarray, odd: np.ndarray, even: np.ndarray) -> float:
    """Symmetric two-reference MSE of the lowpass frame."""
    d_odd = (lp.astype(np.int64) - odd) ** 2
    d_even = (lp.astype(np.int64) - even) ** 2
    return float((d_odd + d_even).sum()) / (2.0 * lp.size)


class PairEvaluator:
    """Caches the per-pair invariants of the cost function: the warped
    prediction frame, the motion payload size, and everything derived from
    xi_p alone (the highpass frame does not depend on xi_u)."""

    def __init__(
        self,
        odd: Frame,
        even: Frame,
        mv: MotionField,
        kind: DenoiserKind,
        lam: float,
        kg: float = KG_DEFAULT,
    ):
        self.odd = odd.data
        self.even = even.data
        self.mv = mv
        self.kind = kind
        self.lam = lam
        self.kg = kg
        self.mv_rate = len(entropy.encode_mv(mv))
        self._warped_odd = motion.warp_array(odd.data, mv)
        self._inv = motion.invert(mv)
        self._by_p: dict[int, tuple[np.ndarray, np.ndarray, int]] = {}
        self._points: dict[tuple[int, int], CostPoint] = {}

    def _predict_side(self, xi_p: int) -> tuple[np.ndarray, np.ndarray, int]:
        cached = self._by_p.get(xi_p)
        if cached is None:
            pred = lifting.predict_term_from_warped(self._warped_odd, xi_p, self.kind, self.kg)
            hp = self.even - pred
            warped_hp = motion.warp_array(hp, self._inv)
            hp_rate = len(entropy.encode_frame_payload(hp))
            cached = (hp, warped_hp, hp_rate)
            self._by_p[xi_p] = cached
        return cached

    def evaluate(self, xi_p: int, xi_u: int) -> CostPoint:
        point = self._points.get((xi_p, xi_u))
        if point is None:
            hp, warped_hp, hp_rate = self._predict_side(xi_p)
            lp = self.odd + lifting.update_term_from_warped(warped_hp, xi_u, self.kind, self.kg)
            rate = len(entropy.encode_frame_payload(lp)) + hp_rate + self.mv_rate
            dist = lowpass_distortion(lp, self.odd, self.even)
            point = CostPoint(xi_p, xi_u, dist, rate, dist + self.lam * rate)
            self._points[(xi_p, xi_u)] = point
        return point


def evaluate_cost(
    odd: Frame,
    even: Frame,
    mv: MotionField,
    xi_p: int,
    xi_u: int,
    kind: DenoiserKind = DenoiserKind.GAUSSIAN,
    lam: float = LAMBDA_BASE,
    kg: float = KG_DEFAULT,
) -> CostPoint:
    return PairEvaluator(odd, even, mv, kind, lam, kg).evaluate(xi_p, xi_u)


def _better(a: CostPoint, b: CostPoint) -> bool:
    """True when a wins: lower cost, ties to smaller xi_p + xi_u, then xi_u."""
    ka = (a.cost, a.xi_p + a.xi_u, a.xi_u)
    kb = (b.cost, b.xi_p + b.xi_u, b.xi_u)
    return ka < kb


def ring_points(i: int) -> list[tuple[int, int]]:
    """Grid points with max(xi_p, xi_u) == i."""
    if i == 0:
        return [(0, 0)]
    points = [(p, i) for p in range(i + 1)]
    points.extend((i, u) for u in range(i))
    return points


def ring_minimize(cost_fn, xi_max: int) -> RingSearchResult:
    """Search strategy on an abstract cost surface; ``cost_fn(p, u)`` must
    return an object with ``cost``/``xi_p``/``xi_u`` attributes.

    Ring i+1 is evaluated while its own minimum stays lower than or equal to
    the running minimum of rings 0..i; the chosen point is the best evaluated
    overall (ties to smaller xi_p + xi_u, then smaller xi_u)."""
    evaluated: list = []
    best = None
    rings = 0
    for i in range(xi_max + 1):
        ring_best = None
        for p, u in ring_points(i):
            point = cost_fn(p, u)
            evaluated.append(point)
            if ring_best is None or _better(point, ring_best):
                ring_best = point
        rings += 1
        if best is None:
            best = ring_best
            continue
        stop = ring_best.cost > best.cost  # ties keep the search going
        if _better(ring_best, best):
            best = ring_best
        if stop:
            break
    return RingSearchResult(chosen=best, evaluated=evaluated, iterations=rings)


def ring_search(
    odd: Frame,
    even: Frame,
    mv: MotionField,
    kind: DenoiserKind = DenoiserKind.GAUSSIAN,
    lam: float = LAMBDA_BASE,
    xi_max: int = XI_MAX_DEFAULT,
    kg: float = KG_DEFAULT,
    evaluator: PairEvaluator | None = None,
) -> RingSearchResult:
    if xi_max < 0:
        raise ValueError("xi_max must be non-negative")
    ev = evaluator or PairEvaluator(odd, even, mv, kind, lam, kg)
    return ring_minimize(ev.evaluate, xi_max)


def encode_sequence_rdo(
    seq,
    lam: float,
    kind: DenoiserKind = DenoiserKind.GAUSSIAN,
    search: motion.SearchParams | None = None,
    xi_max: int = XI_MAX_DEFAULT,
    kg: float = KG_DEFAULT,
) -> list[tuple[lifting.LiftingPair, RingSearchResult]]:
    """Per pair: estimate motion, ring-search the filter strengths, and
    produce the lifting output with the chosen values."""
    from .core import split

    odd, even = split(seq)
    out = []
    for t in range(odd.T):
        mv = motion.estimate_motion(odd.frames[t], even.frames[t], search)
        result = ring_search(odd.frames[t], even.frames[t], mv, kind, lam, xi_max, kg)
        hooks = lifting.DenoiseHooks(
            kind=kind, xi_p=result.chosen.xi_p, xi_u=result.chosen.xi_u, kg=kg
        )
        pair = lifting.analyze(odd.frames[t], even.frames[t], mv, hooks)
        out.append((pair, result))
    return out


def write_cost_tables(path, results: list[RingSearchResult]) -> None:
    """Diagnostics: one CSV record per evaluated point of every pair."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair", "xi_p", "xi_u", "distortion", "rate_bytes", "cost"])
        for t, result in enumerate(results):
            for pt in result.evaluated:
                writer.writerow([t, pt.xi_p, pt.xi_u, f"{pt.distortion:.6f}", pt.rate, f"{pt.cost:.6f}"])
