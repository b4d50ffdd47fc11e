"""Noise-variance estimation and the in-loop denoising filters.

The filters run inside the lifting steps at both encoder and decoder, so they
must be bit-reproducible: all float work is double precision with a fixed
operation order (separable Gaussian row pass then column pass; non-local
means offsets accumulated in raster order), and a strength of zero returns
the input array untouched with no float round trip.

Filter strength is h = xi * sigma_n^2: a dimensionless integer noise
parameter times the estimated noise variance of the filter's own input.
"""

from __future__ import annotations

import enum
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import FrameTooSmall

KG_DEFAULT = 32.0  # maps h to the Gaussian kernel sigma: sigma_k = sqrt(h) / K_g
NLM_PATCH = 5
NLM_WINDOW = 11


class DenoiserKind(enum.Enum):
    GAUSSIAN = "gaussian"
    NLM = "nlm"


@dataclass(frozen=True)
class NoiseEstimate:
    sigma_sq: float


def estimate_noise(data: np.ndarray) -> NoiseEstimate:
    """Laplacian-difference noise estimate (Immerkaer's method).

    sigma = sqrt(pi/2) / (6 (W-2)(H-2)) * sum |data * L|   over interior pixels,
    with L = [[1,-2,1],[-2,4,-2],[1,-2,1]]; returned squared as a variance.
    The mask annihilates constant and planar content, so the response is
    driven by noise. Integer-only accumulation keeps encoder and decoder
    estimates identical.
    """
    a = np.asarray(data)
    h, w = a.shape
    if h < 3 or w < 3:
        raise FrameTooSmall(f"noise estimation needs at least 3x3, got {h}x{w}")
    x = a.astype(np.int64)
    resp = (
        x[:-2, :-2] - 2 * x[:-2, 1:-1] + x[:-2, 2:]
        - 2 * x[1:-1, :-2] + 4 * x[1:-1, 1:-1] - 2 * x[1:-1, 2:]
        + x[2:, :-2] - 2 * x[2:, 1:-1] + x[2:, 2:]
    )
    total = int(np.abs(resp).sum())
    sigma = math.sqrt(math.pi / 2.0) * total / (6.0 * (w - 2) * (h - 2))
    return NoiseEstimate(sigma * sigma)


def filter_strength(xi: int, est: NoiseEstimate) -> float:
    """h = xi * sigma_n^2."""
    if xi < 0:
        raise ValueError("noise parameter must be non-negative")
    return float(xi) * est.sigma_sq


_MAX_KERNEL_RADIUS = 256  # wider kernels are indistinguishable from a global blur


def _gaussian_taps(sigma: float) -> np.ndarray:
    radius = max(1, min(int(math.ceil(3.0 * sigma)), _MAX_KERNEL_RADIUS))
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-0.5 * (k / sigma) ** 2)
    return taps / taps.sum()


def _separable_clamped(data: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Row pass then column pass with border-clamped reads, taps applied in
    ascending offset order (the fixed order the decoder reproduces)."""
    r = (len(taps) - 1) // 2
    padded = np.pad(data.astype(np.float64), ((0, 0), (r, r)), mode="edge")
    rows = np.zeros(data.shape, dtype=np.float64)
    for i, t in enumerate(taps):
        rows += t * padded[:, i : i + data.shape[1]]
    padded = np.pad(rows, ((r, r), (0, 0)), mode="edge")
    out = np.zeros(data.shape, dtype=np.float64)
    for i, t in enumerate(taps):
        out += t * padded[i : i + data.shape[0], :]
    return out


def _gaussian_denoise(data: np.ndarray, h: float, kg: float) -> np.ndarray:
    sigma = math.sqrt(h) / kg
    return _separable_clamped(data, _gaussian_taps(sigma))


# Patch-distance stacks are pure functions of the input frame and are reused
# across the many filter strengths an RDO search evaluates on the same frame.
_DIST_CACHE: OrderedDict[tuple, np.ndarray] = OrderedDict()
_DIST_CACHE_MAX = 8
_OUT_CACHE: OrderedDict[tuple, np.ndarray] = OrderedDict()
_OUT_CACHE_MAX = 256
_CACHE_LOCK = threading.Lock()


def _frame_key(data: np.ndarray) -> tuple:
    # keyed on the raw bytes: a hash collision here would silently corrupt
    # the lifting recursion, so equality must be exact
    a = np.ascontiguousarray(data)
    return (a.tobytes(), a.shape, str(a.dtype))


def _nlm_offsets() -> list[tuple[int, int]]:
    t = NLM_WINDOW // 2
    return [(dy, dx) for dy in range(-t, t + 1) for dx in range(-t, t + 1)]


def _box_sum(arr: np.ndarray, size: int) -> np.ndarray:
    """Sliding ``size`` x ``size`` window sums via an integral image. Inputs
    are integer-valued floats well below 2**53, so the corner differences are
    exact."""
    integral = np.zeros((arr.shape[0] + 1, arr.shape[1] + 1), dtype=np.float64)
    integral[1:, 1:] = arr.cumsum(axis=0).cumsum(axis=1)
    return (
        integral[size:, size:]
        - integral[:-size, size:]
        - integral[size:, :-size]
        + integral[:-size, :-size]
    )


def _nlm_distance_stack(data: np.ndarray) -> np.ndarray:
    """Mean squared 5x5 patch distance to every 11x11 window offset, one map
    per offset, edge-padded borders."""
    key = _frame_key(data)
    with _CACHE_LOCK:
        if key in _DIST_CACHE:
            _DIST_CACHE.move_to_end(key)
            return _DIST_CACHE[key]
    f = NLM_PATCH // 2
    pad = f + NLM_WINDOW // 2
    a = np.pad(data.astype(np.float64), pad, mode="edge")
    hgt, wid = data.shape
    # pixel (y, x) sits at a[y+pad, x+pad]; the squared-difference field over
    # a margin-f band around the image makes every 5x5 box sum a full patch
    base = a[pad - f : pad + hgt + f, pad - f : pad + wid + f]
    stack = np.empty((NLM_WINDOW * NLM_WINDOW, hgt, wid), dtype=np.float64)
    for i, (dy, dx) in enumerate(_nlm_offsets()):
        shifted = a[pad + dy - f : pad + dy + hgt + f, pad + dx - f : pad + dx + wid + f]
        sq = (base - shifted) ** 2
        stack[i] = _box_sum(sq, NLM_PATCH) / float(NLM_PATCH * NLM_PATCH)
    stack.flags.writeable = False
    with _CACHE_LOCK:
        _DIST_CACHE[key] = stack
        while len(_DIST_CACHE) > _DIST_CACHE_MAX:
            _DIST_CACHE.popitem(last=False)
    return stack


def _nlm_denoise(data: np.ndarray, h: float) -> np.ndarray:
    f = NLM_PATCH // 2
    t = NLM_WINDOW // 2
    pad = f + t
    hgt, wid = data.shape
    stack = _nlm_distance_stack(data)
    a = np.pad(data.astype(np.float64), pad, mode="edge")
    num = np.zeros((hgt, wid), dtype=np.float64)
    den = np.zeros((hgt, wid), dtype=np.float64)
    h_sq = h * h
    for i, (dy, dx) in enumerate(_nlm_offsets()):
        weight = np.exp(-stack[i] / h_sq)
        num += weight * a[pad + dy : pad + dy + hgt, pad + dx : pad + dx + wid]
        den += weight
    return num / den


def apply_denoiser(
    data: np.ndarray, kind: DenoiserKind, h: float, kg: float = KG_DEFAULT
) -> np.ndarray:
    """Run the selected filter at strength ``h``; ``h == 0`` is the exact
    identity (the input array is returned as-is, no float conversion)."""
    if h < 0:
        raise ValueError("filter strength must be non-negative")
    if h == 0:
        return data
    key = (_frame_key(data), kind, float(h).hex(), kg)
    with _CACHE_LOCK:
        if key in _OUT_CACHE:
            _OUT_CACHE.move_to_end(key)
            return _OUT_CACHE[key]
    if kind is DenoiserKind.GAUSSIAN:
        out = _gaussian_denoise(np.asarray(data), h, kg)
    elif kind is DenoiserKind.NLM:
        out = _nlm_denoise(np.asarray(data), h)
    else:
        raise ValueError(f"unknown denoiser kind {kind!r}")
    out.flags.writeable = False
    with _CACHE_LOCK:
        _OUT_CACHE[key] = out
        while len(_OUT_CACHE) > _OUT_CACHE_MAX:
            _OUT_CACHE.popitem(last=False)
    return out
