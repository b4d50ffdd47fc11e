import math

import numpy as np
import pytest

from liftcodec.core import Frame, split
from liftcodec.errors import NoOverlap
from liftcodec.lifting import analyze_sequence
from liftcodec.metrics import RdPoint, bd_rate, psnr_lp, read_rd_csv, ssim_lp, write_rd_csv

from conftest import noisy_phantom


def frames_of(*arrays):
    return [Frame(np.asarray(a, dtype=np.int32)) for a in arrays]


class TestPsnr:
    def test_identical_is_infinite(self):
        f = frames_of(np.full((8, 8), 100))
        assert psnr_lp(f, f, f) == math.inf

    def test_plus_one_everywhere(self):
        base = np.full((16, 16), 500)
        lp = frames_of(base + 1)
        ref = frames_of(base)
        expected = 10.0 * math.log10(4095.0**2)  # MSE is exactly 1
        assert psnr_lp(lp, ref, ref) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(72.2451, abs=1e-3)

    def test_static_noiseless_phantom_mctf_infinite(self):
        seq = noisy_phantom(seed=0, w=32, h=32, t=4, sigma=0.0, motion=(0, 0))
        odd, even = split(seq)
        pairs = analyze_sequence(seq)
        assert psnr_lp([p.lp for p in pairs], odd.frames, even.frames) == math.inf


class TestSsim:
    def test_identical_is_one(self):
        f = frames_of(np.arange(64).reshape(8, 8) * 50)
        assert ssim_lp(f, f, f) == pytest.approx(1.0, abs=1e-12)

    def test_heavy_noise_low_similarity(self, rng):
        a = frames_of(rng.integers(0, 4096, size=(64, 64)))
        b = frames_of(rng.integers(0, 4096, size=(64, 64)))
        assert ssim_lp(a, b, b) < 0.5

    def test_symmetric_in_references(self, rng):
        lp = frames_of(rng.integers(0, 4096, size=(32, 32)))
        odd = frames_of(rng.integers(0, 4096, size=(32, 32)))
        even = frames_of(rng.integers(0, 4096, size=(32, 32)))
        assert ssim_lp(lp, odd, even) == pytest.approx(ssim_lp(lp, even, odd), abs=1e-12)


def curve(rates, psnrs, label=""):
    return [RdPoint(int(r), float(q), 0.9, label) for r, q in zip(rates, psnrs)]


class TestBdRate:
    def test_identical_curves_zero(self):
        c = curve([1000, 2000, 4000, 8000], [30, 33, 36, 39])
        assert bd_rate(c, c) == pytest.approx(0.0, abs=1e-9)

    def test_one_percent_shift(self):
        rates = np.array([1000, 2000, 4000, 8000, 16000])
        psnrs = [30, 33, 36, 39, 42]
        anchor = curve(rates, psnrs)
        test = curve(np.round(rates * 0.99).astype(int), psnrs)
        assert bd_rate(anchor, test) == pytest.approx(-1.0, abs=0.05)

    def test_role_reversal_negates(self):
        qs = np.array([30.0, 33.0, 36.0, 39.0, 42.0])
        rates = 1000.0 * 2 ** ((qs - 30.0) / 3.0)
        anchor = curve(rates, qs)
        test = curve(np.round(rates * 0.99), qs + 0.05)
        assert abs(bd_rate(anchor, test) + bd_rate(test, anchor)) < 0.1

    def test_no_overlap(self):
        anchor = curve([1000, 2000, 4000, 8000], [30, 31, 32, 33])
        test = curve([1000, 2000, 4000, 8000], [40, 41, 42, 43])
        with pytest.raises(NoOverlap):
            bd_rate(anchor, test)

    def test_too_few_points(self):
        short = curve([1000, 2000, 4000], [30, 33, 36])
        full = curve([1000, 2000, 4000, 8000], [30, 33, 36, 39])
        with pytest.raises(ValueError):
            bd_rate(short, full)


class TestCsv:
    def test_round_trip(self, tmp_path):
        pts = [RdPoint(1234, 38.5, 0.98765, "mctf"),
               RdPoint(999, math.inf, 1.0, "ref_xi1")]
        path = tmp_path / "rd.csv"
        write_rd_csv(path, pts)
        back = read_rd_csv(path)
        assert back[0].rate_bytes == 1234
        assert back[0].label == "mctf"
        assert back[0].psnr_db == pytest.approx(38.5)
        assert back[1].psnr_db == math.inf
