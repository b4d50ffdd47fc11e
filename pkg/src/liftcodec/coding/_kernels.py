"""Hot loops of the subband entropy coder.

These functions inline the exact range-coder algorithm of ``arith.py`` (same
constants, same renormalization, same context update rule) in a form numba
can compile; an RDO search entropy-codes hundreds of candidate frames per
lifting pair, which is far too many trips through a per-bit Python loop.
When numba is unavailable, or LIFTCODEC_NO_JIT=1 is set, the same source
runs as plain Python with identical output bytes.

Encoder/decoder state is packed into small int64 arrays so the helpers can
mutate it in nopython mode:

    encoder state: [low, high, pending, bit_acc, bit_count, byte_pos]
    decoder state: [low, high, value, byte_acc, bits_avail, byte_pos]

Per-subband context layout (fresh counters per call):
    0..2   significance, bucketed by number of significant causal neighbours
    3..18  magnitude unary bits by position (capped)
    sign and exp-Golomb excess bits are coded in bypass (ctx id -1).
"""

from __future__ import annotations

import os

import numpy as np

MAX_CODE = 0xFFFFFFFF
HALF = 0x80000000
QUARTER = 0x40000000
THREE_QUARTER = 0xC0000000
RESCALE_LIMIT = 1 << 13

UNARY_CAP = 16
N_SUBBAND_CTX = 19

_USE_JIT = os.environ.get("LIFTCODEC_NO_JIT", "") not in ("1", "true", "yes")
if _USE_JIT:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _USE_JIT = False

if _USE_JIT:
    def _jit(fn):
        return _njit(cache=True)(fn)
else:  # pragma: no cover - exercised via LIFTCODEC_NO_JIT in tests
    def _jit(fn):
        return fn


@_jit
def _emit(st, buf, bit):
    st[3] = (st[3] << 1) | bit
    st[4] += 1
    if st[4] == 8:
        buf[st[5]] = st[3] & 0xFF
        st[5] += 1
        st[3] = 0
        st[4] = 0


@_jit
def _emit_with_pending(st, buf, bit):
    _emit(st, buf, bit)
    inv = 1 - bit
    while st[2] > 0:
        _emit(st, buf, inv)
        st[2] -= 1


@_jit
def _enc_bit(st, buf, c0, c1, ctx, bit):
    if ctx >= 0:
        n0 = c0[ctx]
        n1 = c1[ctx]
    else:
        n0 = 1
        n1 = 1
    low = st[0]
    high = st[1]
    rng = high - low + 1
    split = low + rng * n0 // (n0 + n1) - 1
    if bit:
        low = split + 1
    else:
        high = split
    while True:
        if high < HALF:
            _emit_with_pending(st, buf, 0)
        elif low >= HALF:
            _emit_with_pending(st, buf, 1)
            low -= HALF
            high -= HALF
        elif low >= QUARTER and high < THREE_QUARTER:
            st[2] += 1
            low -= QUARTER
            high -= QUARTER
        else:
            break
        low = (low << 1) & MAX_CODE
        high = ((high << 1) & MAX_CODE) | 1
    st[0] = low
    st[1] = high
    if ctx >= 0:
        if bit:
            c1[ctx] += 1
        else:
            c0[ctx] += 1
        if c0[ctx] + c1[ctx] >= RESCALE_LIMIT:
            h0 = c0[ctx] >> 1
            c0[ctx] = h0 if h0 > 0 else 1
            h1 = c1[ctx] >> 1
            c1[ctx] = h1 if h1 > 0 else 1


@_jit
def _enc_finish(st, buf):
    st[2] += 1
    if st[0] >= QUARTER:
        _emit_with_pending(st, buf, 1)
    else:
        _emit_with_pending(st, buf, 0)
    if st[4] > 0:
        buf[st[5]] = (st[3] << (8 - st[4])) & 0xFF
        st[5] += 1
        st[3] = 0
        st[4] = 0
    return st[5]


@_jit
def _read_bit(st, data):
    if st[4] == 0:
        if st[5] < data.shape[0]:
            st[3] = data[st[5]]
            st[5] += 1
            st[4] = 8
        else:
            return 0
    st[4] -= 1
    return (st[3] >> st[4]) & 1


@_jit
def _dec_bit(st, data, c0, c1, ctx):
    if ctx >= 0:
        n0 = c0[ctx]
        n1 = c1[ctx]
    else:
        n0 = 1
        n1 = 1
    low = st[0]
    high = st[1]
    value = st[2]
    rng = high - low + 1
    split = low + rng * n0 // (n0 + n1) - 1
    if value <= split:
        bit = 0
        high = split
    else:
        bit = 1
        low = split + 1
    while True:
        if high < HALF:
            pass
        elif low >= HALF:
            low -= HALF
            high -= HALF
            value -= HALF
        elif low >= QUARTER and high < THREE_QUARTER:
            low -= QUARTER
            high -= QUARTER
            value -= QUARTER
        else:
            break
        low = (low << 1) & MAX_CODE
        high = ((high << 1) & MAX_CODE) | 1
        value = ((value << 1) & MAX_CODE) | _read_bit(st, data)
    st[0] = low
    st[1] = high
    st[2] = value
    if ctx >= 0:
        if bit:
            c1[ctx] += 1
        else:
            c0[ctx] += 1
        if c0[ctx] + c1[ctx] >= RESCALE_LIMIT:
            h0 = c0[ctx] >> 1
            c0[ctx] = h0 if h0 > 0 else 1
            h1 = c1[ctx] >> 1
            c1[ctx] = h1 if h1 > 0 else 1
    return bit


@_jit
def encode_subband_kernel(sub, out):
    """Returns the payload byte count, or -1 if ``out`` is too small."""
    h, w = sub.shape
    st = np.zeros(6, dtype=np.int64)
    st[1] = MAX_CODE
    c0 = np.ones(N_SUBBAND_CTX, dtype=np.int64)
    c1 = np.ones(N_SUBBAND_CTX, dtype=np.int64)
    # one coefficient emits at most a few hundred bytes even in the worst
    # adaptive mismatch, so checking once per coefficient needs real margin
    limit = out.shape[0] - 2048
    for y in range(h):
        for x in range(w):
            if st[5] >= limit:
                return -1
            v = sub[y, x]
            ns = 0
            if x > 0 and sub[y, x - 1] != 0:
                ns += 1
            if y > 0:
                if sub[y - 1, x] != 0:
                    ns += 1
                if x > 0 and sub[y - 1, x - 1] != 0:
                    ns += 1
                if x + 1 < w and sub[y - 1, x + 1] != 0:
                    ns += 1
            ctx = ns if ns < 2 else 2
            if v != 0:
                _enc_bit(st, out, c0, c1, ctx, 1)
                if v < 0:
                    _enc_bit(st, out, c0, c1, -1, 1)
                    m = -v - 1
                else:
                    _enc_bit(st, out, c0, c1, -1, 0)
                    m = v - 1
                if m < UNARY_CAP:
                    for i in range(m):
                        _enc_bit(st, out, c0, c1, 3 + (i if i < 15 else 15), 1)
                    _enc_bit(st, out, c0, c1, 3 + (m if m < 15 else 15), 0)
                else:
                    for i in range(UNARY_CAP):
                        _enc_bit(st, out, c0, c1, 3 + (i if i < 15 else 15), 1)
                    rem = m - UNARY_CAP + 1
                    nb = 0
                    t = rem
                    while t > 0:
                        nb += 1
                        t >>= 1
                    for _ in range(nb - 1):
                        _enc_bit(st, out, c0, c1, -1, 0)
                    for i in range(nb - 1, -1, -1):
                        _enc_bit(st, out, c0, c1, -1, (rem >> i) & 1)
            else:
                _enc_bit(st, out, c0, c1, ctx, 0)
    return _enc_finish(st, out)


@_jit
def decode_subband_kernel(data, sub):
    """Fills ``sub`` in place; returns 0 on success, -1 on malformed input."""
    h, w = sub.shape
    st = np.zeros(6, dtype=np.int64)
    st[1] = MAX_CODE
    for _ in range(32):
        st[2] = (st[2] << 1) | _read_bit(st, data)
    c0 = np.ones(N_SUBBAND_CTX, dtype=np.int64)
    c1 = np.ones(N_SUBBAND_CTX, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            ns = 0
            if x > 0 and sub[y, x - 1] != 0:
                ns += 1
            if y > 0:
                if sub[y - 1, x] != 0:
                    ns += 1
                if x > 0 and sub[y - 1, x - 1] != 0:
                    ns += 1
                if x + 1 < w and sub[y - 1, x + 1] != 0:
                    ns += 1
            ctx = ns if ns < 2 else 2
            if _dec_bit(st, data, c0, c1, ctx) == 0:
                sub[y, x] = 0
                continue
            negative = _dec_bit(st, data, c0, c1, -1)
            m = 0
            while m < UNARY_CAP:
                if _dec_bit(st, data, c0, c1, 3 + (m if m < 15 else 15)) == 0:
                    break
                m += 1
            if m == UNARY_CAP:
                nzeros = 0
                while _dec_bit(st, data, c0, c1, -1) == 0:
                    nzeros += 1
                    if nzeros > 48:
                        return -1
                rem = 1
                for _ in range(nzeros):
                    rem = (rem << 1) | _dec_bit(st, data, c0, c1, -1)
                if rem > 2147483000:  # would overflow the int32 coefficient
                    return -1
                m = UNARY_CAP + rem - 1
            mag = m + 1
            sub[y, x] = -mag if negative else mag
    return 0
