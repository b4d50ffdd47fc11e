"""Adaptive binary arithmetic coder (32-bit integer range coder).

Classic low/high formulation with pending-bit carry resolution; probabilities
come from per-context 0/1 counters that both sides update in lockstep after
each coded bit. All state is integer, so streams are reproducible across
platforms. The numba kernels in ``_kernels.py`` inline this exact algorithm
for the high-volume subband payloads; this module is the readable form used
for motion vectors, side info, and as the reference in tests.
"""

from __future__ import annotations

import numpy as np

MAX_CODE = 0xFFFFFFFF
HALF = 0x80000000
QUARTER = 0x40000000
THREE_QUARTER = 0xC0000000
RESCALE_LIMIT = 1 << 13


class ContextSet:
    """Adaptive 0/1 counters, one pair per context id."""

    def __init__(self, n: int):
        self.count0 = np.ones(n, dtype=np.int64)
        self.count1 = np.ones(n, dtype=np.int64)

    def update(self, ctx: int, bit: int) -> None:
        if bit:
            self.count1[ctx] += 1
        else:
            self.count0[ctx] += 1
        if self.count0[ctx] + self.count1[ctx] >= RESCALE_LIMIT:
            self.count0[ctx] = max(1, int(self.count0[ctx]) >> 1)
            self.count1[ctx] = max(1, int(self.count1[ctx]) >> 1)


class RangeEncoder:
    def __init__(self):
        self.low = 0
        self.high = MAX_CODE
        self.pending = 0
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0

    def _emit(self, bit: int) -> None:
        self._acc = (self._acc << 1) | bit
        self._nbits += 1
        if self._nbits == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nbits = 0

    def _emit_with_pending(self, bit: int) -> None:
        self._emit(bit)
        inv = 1 - bit
        while self.pending:
            self._emit(inv)
            self.pending -= 1

    def _encode(self, bit: int, c0: int, c1: int) -> None:
        rng = self.high - self.low + 1
        split = self.low + rng * c0 // (c0 + c1) - 1
        if bit:
            self.low = split + 1
        else:
            self.high = split
        while True:
            if self.high < HALF:
                self._emit_with_pending(0)
            elif self.low >= HALF:
                self._emit_with_pending(1)
                self.low -= HALF
                self.high -= HALF
            elif self.low >= QUARTER and self.high < THREE_QUARTER:
                self.pending += 1
                self.low -= QUARTER
                self.high -= QUARTER
            else:
                break
            self.low = (self.low << 1) & MAX_CODE
            self.high = ((self.high << 1) & MAX_CODE) | 1

    def encode(self, bit: int, ctxs: ContextSet, ctx: int) -> None:
        self._encode(bit, int(ctxs.count0[ctx]), int(ctxs.count1[ctx]))
        ctxs.update(ctx, bit)

    def encode_bypass(self, bit: int) -> None:
        self._encode(bit, 1, 1)

    def finish(self) -> bytes:
        self.pending += 1
        self._emit_with_pending(1 if self.low >= QUARTER else 0)
        if self._nbits:
            self._acc <<= 8 - self._nbits
            self._buf.append(self._acc)
            self._acc = 0
            self._nbits = 0
        return bytes(self._buf)


class RangeDecoder:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self._acc = 0
        self._nbits = 0
        self.low = 0
        self.high = MAX_CODE
        self.value = 0
        for _ in range(32):
            self.value = (self.value << 1) | self._read_bit()

    def _read_bit(self) -> int:
        if self._nbits == 0:
            if self._pos >= len(self._data):
                return 0  # zero-padding past the end is part of the format
            self._acc = self._data[self._pos]
            self._pos += 1
            self._nbits = 8
        self._nbits -= 1
        return (self._acc >> self._nbits) & 1

    def _decode(self, c0: int, c1: int) -> int:
        rng = self.high - self.low + 1
        split = self.low + rng * c0 // (c0 + c1) - 1
        if self.value <= split:
            bit = 0
            self.high = split
        else:
            bit = 1
            self.low = split + 1
        while True:
            if self.high < HALF:
                pass
            elif self.low >= HALF:
                self.low -= HALF
                self.high -= HALF
                self.value -= HALF
            elif self.low >= QUARTER and self.high < THREE_QUARTER:
                self.low -= QUARTER
                self.high -= QUARTER
                self.value -= QUARTER
            else:
                break
            self.low = (self.low << 1) & MAX_CODE
            self.high = ((self.high << 1) & MAX_CODE) | 1
            self.value = ((self.value << 1) & MAX_CODE) | self._read_bit()
        return bit

    def decode(self, ctxs: ContextSet, ctx: int) -> int:
        bit = self._decode(int(ctxs.count0[ctx]), int(ctxs.count1[ctx]))
        ctxs.update(ctx, bit)
        return bit

    def decode_bypass(self) -> int:
        return self._decode(1, 1)


def encode_exp_golomb(enc: RangeEncoder, value: int) -> None:
    """Order-0 exp-Golomb in bypass bits (prefix of n zeros, then n+1 bits)."""
    v = value + 1
    nbits = v.bit_length()
    for _ in range(nbits - 1):
        enc.encode_bypass(0)
    for i in range(nbits - 1, -1, -1):
        enc.encode_bypass((v >> i) & 1)


def decode_exp_golomb(dec: RangeDecoder) -> int:
    nzeros = 0
    while dec.decode_bypass() == 0:
        nzeros += 1
        if nzeros > 48:
            from ..errors import CorruptStream

            raise CorruptStream("exp-Golomb prefix too long")
    v = 1
    for _ in range(nzeros):
        v = (v << 1) | dec.decode_bypass()
    return v - 1
