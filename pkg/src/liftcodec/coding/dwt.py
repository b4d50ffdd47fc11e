"""Reversible integer 5/3 spatial wavelet (lifting form).

One level along an axis, with whole-point symmetric extension:

    d[n] = x[2n+1] - floor((x[2n] + x[2n+2]) / 2)
    s[n] = x[2n]   + floor((d[n-1] + d[n] + 2) / 4)

Even-indexed samples become the lowpass half, so a length-N signal yields
ceil(N/2) lowpass and floor(N/2) highpass samples. 2-D levels transform rows
then columns of the current LL region and store subbands in the usual
quadrant (Mallat) layout. Everything is integer, so the inverse is bit-exact.
"""

from __future__ import annotations

import math

import numpy as np

MAX_LEVELS = 4


def levels_for(width: int, height: int) -> int:
    """Decomposition depth used for a frame: capped at 4, reduced so every
    transformed length stays at least 2."""
    m = min(width, height)
    if m < 2:
        return 0
    return min(MAX_LEVELS, int(math.floor(math.log2(m))))


def _forward_axis(x: np.ndarray) -> np.ndarray:
    """5/3 analysis along axis 0 (works on 2-D arrays, columns in parallel)."""
    n = x.shape[0]
    even = x[0::2].astype(np.int64)
    odd = x[1::2].astype(np.int64)
    ne, no = even.shape[0], odd.shape[0]
    if no == 0:
        return x.copy()
    # predict: x[2n+2] with symmetric extension x[N] := x[N-2]
    nxt = even[1:] if ne > no else np.concatenate([even[1:], even[-1:]], axis=0)
    d = odd - (even[:no] + nxt) // 2
    # update: d[-1] := d[0], d[no] := d[no-1]
    prev = np.concatenate([d[:1], d], axis=0)[:ne]
    cur = d if ne == no else np.concatenate([d, d[-1:]], axis=0)
    s = even + (prev + cur + 2) // 4
    return np.concatenate([s, d], axis=0)


def _inverse_axis(y: np.ndarray) -> np.ndarray:
    n = y.shape[0]
    ne = (n + 1) // 2
    s = y[:ne].astype(np.int64)
    d = y[ne:].astype(np.int64)
    no = d.shape[0]
    if no == 0:
        return y.copy()
    prev = np.concatenate([d[:1], d], axis=0)[:ne]
    cur = d if ne == no else np.concatenate([d, d[-1:]], axis=0)
    even = s - (prev + cur + 2) // 4
    nxt = even[1:] if ne > no else np.concatenate([even[1:], even[-1:]], axis=0)
    odd = d + (even[:no] + nxt) // 2
    x = np.empty((n,) + y.shape[1:], dtype=np.int64)
    x[0::2] = even
    x[1::2] = odd
    return x


def spatial_forward(frame: np.ndarray, levels: int | None = None) -> np.ndarray:
    """Multi-level 2-D transform; returns an int32 coefficient canvas in
    quadrant layout (same shape as the input)."""
    data = np.asarray(frame)
    h, w = data.shape
    if levels is None:
        levels = levels_for(w, h)
    canvas = data.astype(np.int64)
    cw, ch = w, h
    for _ in range(levels):
        region = canvas[:ch, :cw]
        region = _forward_axis(region.T).T  # rows
        region = _forward_axis(region)  # columns
        canvas[:ch, :cw] = region
        cw = (cw + 1) // 2
        ch = (ch + 1) // 2
    return canvas.astype(np.int32)


def spatial_inverse(coeffs: np.ndarray, levels: int | None = None) -> np.ndarray:
    data = np.asarray(coeffs)
    h, w = data.shape
    if levels is None:
        levels = levels_for(w, h)
    canvas = data.astype(np.int64)
    dims = [(w, h)]
    for _ in range(levels):
        w, h = (w + 1) // 2, (h + 1) // 2
        dims.append((w, h))
    for lev in range(levels, 0, -1):
        cw, ch = dims[lev - 1]
        region = canvas[:ch, :cw]
        region = _inverse_axis(region)  # columns
        region = _inverse_axis(region.T).T  # rows
        canvas[:ch, :cw] = region
    return canvas.astype(np.int32)


def subband_rects(width: int, height: int, levels: int) -> list[tuple[str, int, int, int, int]]:
    """Coding order of subbands as (name, y0, x0, h, w), coarsest first.

    The geometry is a pure function of (width, height, levels), so the
    decoder reconstructs it without side information.
    """
    dims = [(width, height)]
    w, h = width, height
    for _ in range(levels):
        w, h = (w + 1) // 2, (h + 1) // 2
        dims.append((w, h))
    rects = []
    lw, lh = dims[levels]
    rects.append((f"LL{levels}", 0, 0, lh, lw))
    for lev in range(levels, 0, -1):
        pw, ph = dims[lev - 1]  # size of the region this level transformed
        cw, ch = dims[lev]  # its lowpass half
        rects.append((f"HL{lev}", 0, cw, ch, pw - cw))
        rects.append((f"LH{lev}", ch, 0, ph - ch, cw))
        rects.append((f"HH{lev}", ch, cw, ph - ch, pw - cw))
    return rects
