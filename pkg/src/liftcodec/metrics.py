"""Evaluation metrics: two-reference lowpass PSNR and SSIM, and BD-rate.

The lowpass metrics compare every temporal lowpass frame against both of its
source frames (odd- and even-indexed), matching the distortion the encoder
optimizes. BD-rate fits piecewise-cubic curves through (quality, log rate)
points and integrates the rate difference over the shared quality range.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .core import MAX_SAMPLE
from .errors import DimensionMismatch, NoOverlap

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class RdPoint:
    rate_bytes: int
    psnr_db: float
    ssim: float
    label: str = ""


def _check_counts(lp_frames, odd_frames, even_frames):
    if not (len(lp_frames) == len(odd_frames) == len(even_frames)) or not lp_frames:
        raise DimensionMismatch("metric inputs must have equal, nonzero frame counts")


def _data(frame) -> np.ndarray:
    return frame.data if hasattr(frame, "data") else np.asarray(frame)


def psnr_lp(lp_frames, odd_frames, even_frames) -> float:
    """10*log10(peak^2 / MSE) with the symmetric two-reference MSE; +inf when
    the lowpass equals both references exactly."""
    _check_counts(lp_frames, odd_frames, even_frames)
    total = 0.0
    n = 0
    for lp, odd, even in zip(lp_frames, odd_frames, even_frames):
        a, o, e = _data(lp).astype(np.int64), _data(odd), _data(even)
        if a.shape != o.shape or a.shape != e.shape:
            raise DimensionMismatch("metric frames disagree on dimensions")
        total += float(((a - o) ** 2 + (a - e) ** 2).sum()) / 2.0
        n += a.size
    mse = total / n
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(MAX_SAMPLE**2 / mse)


def _gauss_window(size: int, sigma: float) -> np.ndarray:
    k = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-0.5 * (k / sigma) ** 2)
    return w / w.sum()


def _filter2(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    r = (len(taps) - 1) // 2
    padded = np.pad(img, ((0, 0), (r, r)), mode="reflect")
    out = np.zeros_like(img)
    for i, t in enumerate(taps):
        out += t * padded[:, i : i + img.shape[1]]
    padded = np.pad(out, ((r, r), (0, 0)), mode="reflect")
    out2 = np.zeros_like(img)
    for i, t in enumerate(taps):
        out2 += t * padded[i : i + img.shape[0], :]
    return out2


def _ssim_single(x: np.ndarray, y: np.ndarray) -> float:
    taps = _gauss_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (SSIM_K1 * MAX_SAMPLE) ** 2
    c2 = (SSIM_K2 * MAX_SAMPLE) ** 2
    mu_x = _filter2(x, taps)
    mu_y = _filter2(y, taps)
    var_x = np.maximum(_filter2(x * x, taps) - mu_x**2, 0.0)
    var_y = np.maximum(_filter2(y * y, taps) - mu_y**2, 0.0)
    cov = _filter2(x * y, taps) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def ssim_lp(lp_frames, odd_frames, even_frames) -> float:
    """Mean SSIM of each lowpass frame against both references."""
    _check_counts(lp_frames, odd_frames, even_frames)
    values = []
    for lp, odd, even in zip(lp_frames, odd_frames, even_frames):
        a = _data(lp).astype(np.float64)
        o = _data(odd).astype(np.float64)
        e = _data(even).astype(np.float64)
        if a.shape != o.shape or a.shape != e.shape:
            raise DimensionMismatch("metric frames disagree on dimensions")
        values.append(0.5 * (_ssim_single(a, o) + _ssim_single(a, e)))
    return float(np.mean(values))


def _curve(points: list[RdPoint]) -> tuple[np.ndarray, np.ndarray]:
    quality = np.array([p.psnr_db for p in points], dtype=np.float64)
    rate = np.array([p.rate_bytes for p in points], dtype=np.float64)
    keep = np.isfinite(quality) & (rate > 0)
    quality, rate = quality[keep], rate[keep]
    if len(quality) < 4:
        raise ValueError("need at least 4 finite points per curve")
    order = np.argsort(quality)
    quality, rate = quality[order], np.log(rate[order])
    # merge duplicate qualities so the interpolant sees strictly rising x
    # (adjacent lambdas can pick identical operating points)
    uq, inverse = np.unique(quality, return_inverse=True)
    if len(uq) < len(quality):
        merged = np.zeros(len(uq))
        for i in range(len(uq)):
            merged[i] = rate[inverse == i].mean()
        quality, rate = uq, merged
    return quality, rate


def _interp(q: np.ndarray, r: np.ndarray):
    if len(q) == 1:
        value = float(r[0])
        return lambda xs: np.full(np.shape(xs), value)
    return PchipInterpolator(q, r)


def bd_rate(anchor: list[RdPoint], test: list[RdPoint]) -> float:
    """Average rate difference of ``test`` vs ``anchor`` in percent (negative
    means the test curve needs fewer bytes at equal quality).

    When one side saturates to a single operating point (adjacent lambdas can
    coincide), the integral degenerates to the rate ratio at that quality,
    the continuous limit of the usual definition.
    """
    qa, ra = _curve(anchor)
    qt, rt = _curve(test)
    lo = max(qa.min(), qt.min())
    hi = min(qa.max(), qt.max())
    if hi < lo:
        raise NoOverlap(
            f"quality ranges [{qa.min()}, {qa.max()}] and [{qt.min()}, {qt.max()}] do not overlap"
        )
    fa = _interp(qa, ra)
    ft = _interp(qt, rt)
    if hi == lo:
        avg_diff = float(ft(lo) - fa(lo))
    else:
        xs = np.linspace(lo, hi, 128)
        avg_diff = float(np.trapezoid(ft(xs) - fa(xs), xs) / (hi - lo))
    return float((math.exp(avg_diff) - 1.0) * 100.0)


def write_rd_csv(path, points: list[RdPoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rate_bytes", "psnr_db", "ssim", "label"])
        for p in points:
            writer.writerow([p.rate_bytes, f"{p.psnr_db:.6f}", f"{p.ssim:.6f}", p.label])


def read_rd_csv(path) -> list[RdPoint]:
    points = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            points.append(
                RdPoint(
                    rate_bytes=int(row["rate_bytes"]),
                    psnr_db=float(row["psnr_db"]),
                    ssim=float(row["ssim"]),
                    label=row["label"],
                )
            )
    return points
