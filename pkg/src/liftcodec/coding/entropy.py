"""Entropy coding of subbands, motion vectors, and noise-parameter side info.

Subband payloads carry one arithmetic blob per subband with fresh contexts,
which keeps the compressed size of a frame a pure function of that frame —
the rate an RDO candidate sees during the search is exactly the byte count
that lands in the final stream. Motion vectors are coded predictively from
the left neighbour. Noise parameters are unary-binarized with adaptive
per-position contexts that persist across all pairs of a stream, since
chosen values cluster strongly within a sequence.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import CorruptStream, TruncatedStream, XiOverCap
from ..motion import MotionField
from . import _kernels, dwt
from .arith import ContextSet, RangeDecoder, RangeEncoder, decode_exp_golomb, encode_exp_golomb

XI_CAP = 255
_XI_CTX_PER_SIDE = 16
_MV_UNARY_CAP = 8
_MV_CTX = 10  # positions 0..8 plus a shared tail


def encode_subband(coeffs: np.ndarray) -> bytes:
    """Sign/magnitude coding of one subband; empty subbands cost nothing."""
    sub = np.ascontiguousarray(coeffs, dtype=np.int32)
    if sub.size == 0:
        return b""
    size = 4096 + sub.size * 4
    while True:
        out = np.empty(size, dtype=np.uint8)
        n = _kernels.encode_subband_kernel(sub, out)
        if n >= 0:
            return out[:n].tobytes()
        size *= 2


def decode_subband(data: bytes, height: int, width: int) -> np.ndarray:
    if height * width == 0:
        return np.zeros((height, width), dtype=np.int32)
    sub = np.zeros((height, width), dtype=np.int32)
    buf = np.frombuffer(data, dtype=np.uint8)
    if _kernels.decode_subband_kernel(buf, sub) < 0:
        raise CorruptStream("malformed subband payload")
    return sub


def encode_frame_payload(samples: np.ndarray, levels: int | None = None) -> bytes:
    """Spatial transform + per-subband blobs, each u32-length-prefixed."""
    h, w = samples.shape
    if levels is None:
        levels = dwt.levels_for(w, h)
    canvas = dwt.spatial_forward(samples, levels)
    parts = []
    for _name, y0, x0, sh, sw in dwt.subband_rects(w, h, levels):
        blob = encode_subband(canvas[y0 : y0 + sh, x0 : x0 + sw])
        parts.append(struct.pack("<I", len(blob)))
        parts.append(blob)
    return b"".join(parts)


def decode_frame_payload(data: bytes, width: int, height: int, levels: int | None = None) -> np.ndarray:
    if levels is None:
        levels = dwt.levels_for(width, height)
    canvas = np.zeros((height, width), dtype=np.int32)
    pos = 0
    for _name, y0, x0, sh, sw in dwt.subband_rects(width, height, levels):
        if pos + 4 > len(data):
            raise TruncatedStream("frame payload ended inside a subband prefix", pos)
        (blob_len,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + blob_len > len(data):
            raise TruncatedStream("frame payload ended inside a subband blob", pos)
        canvas[y0 : y0 + sh, x0 : x0 + sw] = decode_subband(data[pos : pos + blob_len], sh, sw)
        pos += blob_len
    if pos != len(data):
        raise CorruptStream(f"frame payload has {len(data) - pos} trailing bytes")
    return dwt.spatial_inverse(canvas, levels)


def _encode_unary_hybrid(enc: RangeEncoder, ctxs: ContextSet, base: int, n_ctx: int, cap: int, value: int) -> None:
    if value < cap:
        for i in range(value):
            enc.encode(1, ctxs, base + min(i, n_ctx - 1))
        enc.encode(0, ctxs, base + min(value, n_ctx - 1))
    else:
        for i in range(cap):
            enc.encode(1, ctxs, base + min(i, n_ctx - 1))
        encode_exp_golomb(enc, value - cap)


def _decode_unary_hybrid(dec: RangeDecoder, ctxs: ContextSet, base: int, n_ctx: int, cap: int) -> int:
    v = 0
    while v < cap:
        if dec.decode(ctxs, base + min(v, n_ctx - 1)) == 0:
            return v
        v += 1
    return cap + decode_exp_golomb(dec)


def encode_mv(mf: MotionField) -> bytes:
    """Left-neighbour predictive coding; 9-byte geometry header + blob."""
    head = struct.pack("<BHHHH", mf.block_size, mf.cols, mf.rows, mf.width, mf.height)
    enc = RangeEncoder()
    ctxs = ContextSet(2 * (_MV_CTX + 1))  # per component: unary ctxs + sign
    for comp in range(2):
        base = comp * (_MV_CTX + 1)
        for by in range(mf.rows):
            pred = 0
            for bx in range(mf.cols):
                v = int(mf.vectors[by, bx, comp])
                res = v - pred
                mag = abs(res)
                _encode_unary_hybrid(enc, ctxs, base, _MV_CTX, _MV_UNARY_CAP, mag)
                if mag:
                    enc.encode(1 if res < 0 else 0, ctxs, base + _MV_CTX)
                pred = v
    return head + enc.finish()


def decode_mv(data: bytes) -> MotionField:
    if len(data) < 9:
        raise TruncatedStream("motion payload shorter than its header", len(data))
    block_size, cols, rows, width, height = struct.unpack_from("<BHHHH", data)
    if block_size < 1:
        raise CorruptStream("motion payload declares block size 0")
    dec = RangeDecoder(data[9:])
    ctxs = ContextSet(2 * (_MV_CTX + 1))
    vectors = np.zeros((rows, cols, 2), dtype=np.int32)
    for comp in range(2):
        base = comp * (_MV_CTX + 1)
        for by in range(rows):
            pred = 0
            for bx in range(cols):
                mag = _decode_unary_hybrid(dec, ctxs, base, _MV_CTX, _MV_UNARY_CAP)
                if mag > 1 << 20:
                    raise CorruptStream("implausible motion residual")
                res = mag
                if mag and dec.decode(ctxs, base + _MV_CTX):
                    res = -mag
                v = pred + res
                vectors[by, bx, comp] = v
                pred = v
    try:
        return MotionField(block_size, width, height, vectors)
    except ValueError as exc:
        raise CorruptStream(f"inconsistent motion geometry: {exc}") from None


class XiEncoder:
    """Noise-parameter side info for a whole stream, one value pair per
    lifting step; contexts persist across pairs."""

    def __init__(self, cap: int = XI_CAP):
        self.cap = cap
        self._enc = RangeEncoder()
        self._ctxs = ContextSet(2 * _XI_CTX_PER_SIDE)

    def add(self, xi_p: int, xi_u: int) -> None:
        for side, xi in enumerate((xi_p, xi_u)):
            if not 0 <= xi <= self.cap:
                raise XiOverCap(f"noise parameter {xi} outside [0, {self.cap}]")
            base = side * _XI_CTX_PER_SIDE
            for i in range(xi):
                self._enc.encode(1, self._ctxs, base + min(i, _XI_CTX_PER_SIDE - 1))
            self._enc.encode(0, self._ctxs, base + min(xi, _XI_CTX_PER_SIDE - 1))

    def finish(self) -> bytes:
        return self._enc.finish()


def encode_xi_pairs(pairs: list[tuple[int, int]], cap: int = XI_CAP) -> bytes:
    enc = XiEncoder(cap)
    for xi_p, xi_u in pairs:
        enc.add(xi_p, xi_u)
    return enc.finish()


def decode_xi_pairs(data: bytes, count: int, cap: int = XI_CAP) -> list[tuple[int, int]]:
    dec = RangeDecoder(data)
    ctxs = ContextSet(2 * _XI_CTX_PER_SIDE)
    out = []
    for _ in range(count):
        vals = []
        for side in range(2):
            base = side * _XI_CTX_PER_SIDE
            v = 0
            while dec.decode(ctxs, base + min(v, _XI_CTX_PER_SIDE - 1)):
                v += 1
                if v > cap:
                    raise CorruptStream(f"noise parameter exceeds the cap {cap}")
            vals.append(v)
        out.append((vals[0], vals[1]))
    return out
