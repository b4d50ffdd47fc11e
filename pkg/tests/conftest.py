import numpy as np
import pytest

from liftcodec.core import Frame, PhantomSpec, Sequence, generate_phantom


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_frame(rng, h=16, w=16, lo=0, hi=4095):
    return Frame(rng.integers(lo, hi + 1, size=(h, w), dtype=np.int64).astype(np.int32))


def random_sequence(rng, t=4, h=16, w=16):
    return Sequence(tuple(random_frame(rng, h, w) for _ in range(t)))


def noisy_phantom(seed=0, w=32, h=32, t=8, sigma=8.0, radius=0, motion=(1, 0)):
    spec = PhantomSpec(width=w, height=h, frames=t, sigma=sigma, corr_radius=radius, motion=motion)
    return generate_phantom(spec, seed)
