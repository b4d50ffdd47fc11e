import numpy as np
import pytest

from liftcodec.denoise import (
    DenoiserKind,
    NoiseEstimate,
    apply_denoiser,
    estimate_noise,
    filter_strength,
)
from liftcodec.errors import FrameTooSmall


def total_variation(img):
    d = np.abs(np.diff(img, axis=0)).sum() + np.abs(np.diff(img, axis=1)).sum()
    return float(d)


class TestEstimateNoise:
    def test_constant_frame_zero(self):
        assert estimate_noise(np.full((16, 16), 123, dtype=np.int32)).sigma_sq == 0.0

    def test_ramp_annihilated(self):
        ys, xs = np.mgrid[0:32, 0:32]
        ramp = (3 * xs + 5 * ys).astype(np.int32)
        assert estimate_noise(ramp).sigma_sq == 0.0

    def test_flat_noise_accuracy(self):
        rng = np.random.default_rng(9)
        estimates = []
        for _ in range(20):
            frame = np.rint(600 + rng.standard_normal((256, 256)) * 10).astype(np.int32)
            estimates.append(estimate_noise(frame).sigma_sq)
        assert abs(np.mean(estimates) - 100.0) / 100.0 < 0.10

    def test_variance_scaling(self):
        rng = np.random.default_rng(10)
        small, big = [], []
        for _ in range(10):
            base = rng.standard_normal((128, 128))
            small.append(estimate_noise(np.rint(600 + base * 8).astype(np.int32)).sigma_sq)
            big.append(estimate_noise(np.rint(600 + base * 16).astype(np.int32)).sigma_sq)
        ratio = np.mean(big) / np.mean(small)
        assert abs(ratio - 4.0) / 4.0 < 0.15

    def test_too_small(self):
        with pytest.raises(FrameTooSmall):
            estimate_noise(np.zeros((2, 5), dtype=np.int32))

    def test_noiseless_phantom_reads_near_zero(self):
        from liftcodec.core import PhantomSpec, generate_phantom

        seq = generate_phantom(PhantomSpec(width=64, height=64, frames=2, sigma=0.0), 1)
        for frame in seq.frames:
            # soft ellipse rims leave a small residue, nothing like noise
            assert estimate_noise(frame.data).sigma_sq < 5.0


class TestFilterStrength:
    def test_zero_xi(self):
        assert filter_strength(0, NoiseEstimate(250.0)) == 0.0

    def test_product(self):
        assert filter_strength(4, NoiseEstimate(25.0)) == 100.0

    def test_zero_variance(self):
        assert filter_strength(25, NoiseEstimate(0.0)) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            filter_strength(-1, NoiseEstimate(1.0))


class TestApplyDenoiser:
    def test_zero_strength_identity_same_object(self, rng):
        frame = rng.integers(0, 4096, size=(12, 12)).astype(np.int32)
        out = apply_denoiser(frame, DenoiserKind.GAUSSIAN, 0.0)
        assert out is frame

    @pytest.mark.parametrize("kind", [DenoiserKind.GAUSSIAN, DenoiserKind.NLM])
    def test_constant_preserved(self, kind):
        frame = np.full((16, 16), 1500, dtype=np.int32)
        out = apply_denoiser(frame, kind, 400.0)
        assert np.allclose(out, 1500.0)

    def test_gaussian_kernel_normalized(self):
        impulse = np.zeros((33, 33), dtype=np.int32)
        impulse[16, 16] = 4000
        out = apply_denoiser(impulse, DenoiserKind.GAUSSIAN, 900.0)
        assert abs(out.sum() - 4000.0) / 4000.0 < 1e-6

    def test_gaussian_tv_monotone_in_h(self, rng):
        for _ in range(10):
            frame = rng.integers(0, 4096, size=(24, 24)).astype(np.int32)
            tvs = [
                total_variation(np.asarray(apply_denoiser(frame, DenoiserKind.GAUSSIAN, h), dtype=np.float64))
                for h in (100.0, 400.0, 1600.0, 6400.0)
            ]
            assert all(tvs[i] >= tvs[i + 1] - 1e-9 for i in range(len(tvs) - 1))

    def test_negative_strength_rejected(self, rng):
        with pytest.raises(ValueError):
            apply_denoiser(np.zeros((8, 8), dtype=np.int32), DenoiserKind.GAUSSIAN, -1.0)

    @pytest.mark.parametrize("kind", [DenoiserKind.GAUSSIAN, DenoiserKind.NLM])
    def test_deterministic(self, rng, kind):
        frame = rng.integers(0, 4096, size=(20, 20)).astype(np.int32)
        a = np.asarray(apply_denoiser(frame, kind, 777.0))
        b = np.asarray(apply_denoiser(frame.copy(), kind, 777.0))
        assert np.array_equal(a, b)

    def test_nlm_smooths_noise(self, rng):
        clean = np.full((32, 32), 1000, dtype=np.float64)
        noisy = np.rint(clean + rng.standard_normal((32, 32)) * 15).astype(np.int32)
        out = np.asarray(apply_denoiser(noisy, DenoiserKind.NLM, 450.0))
        assert out.var() < noisy.astype(np.float64).var() * 0.6
