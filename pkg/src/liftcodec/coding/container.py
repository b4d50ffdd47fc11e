"""Bitstream container: header parsing, payload muxing, and full demux.

Layout (little-endian throughout, documented byte-exactly in
docs/bitstream.md):

    32-byte header: magic "WLDP", version, dimensions, frame count, bit
    depth, denoiser kind, kernel constant, block size, spatial levels,
    encoder mode and its parameter.

    One stream-level side-info section (u32 length + blob) carrying the
    (xi_p, xi_u) of every pair, then per pair three u32-length-prefixed
    payloads: motion vectors, lowpass frame, highpass frame.

The decoder needs nothing out of band: it rebuilds the motion field and both
subband frames, then recomputes the identical denoised prediction and update
terms, so the decoded sequence is bit-identical to the encoder input.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

from ..core import Frame, Sequence, SequenceRole, interleave
from ..denoise import DenoiserKind
from ..errors import BadHeader, CorruptStream, TruncatedStream
from ..lifting import DenoiseHooks, LiftingPair, synthesize
from . import entropy

MAGIC = b"WLDP"
VERSION = 1
HEADER_SIZE = 32
_HEADER_FMT = "<4sBHHHBBdBBBd"  # exactly 32 bytes

MODE_MCTF = 0
MODE_FIXED_XI = 1
MODE_RDO = 2

_KIND_CODES = {DenoiserKind.GAUSSIAN: 0, DenoiserKind.NLM: 1}
_KIND_FROM_CODE = {v: k for k, v in _KIND_CODES.items()}


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    frame_count: int
    bitdepth: int
    kind: DenoiserKind
    kg: float
    block_size: int
    spatial_levels: int
    mode: int
    mode_param: float

    def pack(self) -> bytes:
        return struct.pack(
            _HEADER_FMT,
            MAGIC,
            VERSION,
            self.width,
            self.height,
            self.frame_count,
            self.bitdepth,
            _KIND_CODES[self.kind],
            self.kg,
            self.block_size,
            self.spatial_levels,
            self.mode,
            self.mode_param,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "StreamHeader":
        if len(data) < HEADER_SIZE:
            raise TruncatedStream("stream shorter than the header", len(data))
        magic, version, w, h, t, depth, kind_code, kg, bs, levels, mode, param = struct.unpack_from(
            _HEADER_FMT, data
        )
        if magic != MAGIC:
            raise BadHeader(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise BadHeader(f"unsupported version {version}")
        if kind_code not in _KIND_FROM_CODE:
            raise BadHeader(f"unknown denoiser code {kind_code}")
        if mode not in (MODE_MCTF, MODE_FIXED_XI, MODE_RDO):
            raise BadHeader(f"unknown encoder mode {mode}")
        if w < 1 or h < 1 or t < 2 or t % 2 != 0:
            raise BadHeader(f"implausible geometry {w}x{h}x{t}")
        return cls(w, h, t, depth, _KIND_FROM_CODE[kind_code], kg, bs, levels, mode, param)


def mux(pairs: list[LiftingPair], header: StreamHeader) -> bytes:
    return mux_accounted(pairs, header, None)[0]


def mux_accounted(
    pairs: list[LiftingPair], header: StreamHeader, byte_counts: list[dict] | None
) -> tuple[bytes, int]:
    """Assemble the stream; optionally fills one dict per pair with the
    payload byte counts ("mv", "lp", "hp")."""
    out = [header.pack()]
    xi_blob = entropy.encode_xi_pairs([(p.xi_p, p.xi_u) for p in pairs])
    out.append(struct.pack("<I", len(xi_blob)))
    out.append(xi_blob)
    levels = header.spatial_levels
    for t, pair in enumerate(pairs):
        mv_blob = entropy.encode_mv(pair.mv)
        lp_blob = entropy.encode_frame_payload(pair.lp.data, levels)
        hp_blob = entropy.encode_frame_payload(pair.hp.data, levels)
        for blob in (mv_blob, lp_blob, hp_blob):
            out.append(struct.pack("<I", len(blob)))
            out.append(blob)
        if byte_counts is not None:
            byte_counts[t]["mv"] = len(mv_blob)
            byte_counts[t]["lp"] = len(lp_blob)
            byte_counts[t]["hp"] = len(hp_blob)
    body = b"".join(out[1:])
    # arithmetic payloads decode *something* for any input, so corruption
    # needs an explicit integrity check to surface as an error
    return out[0] + body + struct.pack("<I", zlib.crc32(body)), len(xi_blob)


def _read_section(data: bytes, pos: int) -> tuple[bytes, int]:
    if pos + 4 > len(data):
        raise TruncatedStream("stream ended inside a length prefix", pos)
    (n,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + n > len(data):
        raise TruncatedStream("stream ended inside a payload", pos)
    return data[pos : pos + n], pos + n


def demux(data: bytes) -> Sequence:
    """Full decode: entropy decoding, spatial inverse, lifting synthesis."""
    header = StreamHeader.unpack(data)
    n_pairs = header.frame_count // 2

    # structural walk first, so truncation surfaces at the exact boundary
    pos = HEADER_SIZE
    _, pos = _read_section(data, pos)
    for _ in range(n_pairs):
        for _ in range(3):
            _, pos = _read_section(data, pos)
    if pos + 4 > len(data):
        raise TruncatedStream("stream ends before the integrity trailer", pos)
    if pos + 4 != len(data):
        raise CorruptStream(f"{len(data) - pos - 4} trailing bytes after the trailer")
    (crc,) = struct.unpack_from("<I", data, pos)
    if zlib.crc32(data[HEADER_SIZE:pos]) != crc:
        raise CorruptStream("payload checksum mismatch")

    pos = HEADER_SIZE
    xi_blob, pos = _read_section(data, pos)
    xi_values = entropy.decode_xi_pairs(xi_blob, n_pairs)
    hooks = DenoiseHooks(kind=header.kind, kg=header.kg)
    odd_frames = []
    even_frames = []
    for t in range(n_pairs):
        mv_blob, pos = _read_section(data, pos)
        lp_blob, pos = _read_section(data, pos)
        hp_blob, pos = _read_section(data, pos)
        mv = entropy.decode_mv(mv_blob)
        if (mv.width, mv.height, mv.block_size) != (header.width, header.height, header.block_size):
            raise CorruptStream(f"pair {t}: motion geometry disagrees with the stream header")
        lp = entropy.decode_frame_payload(lp_blob, header.width, header.height, header.spatial_levels)
        hp = entropy.decode_frame_payload(hp_blob, header.width, header.height, header.spatial_levels)
        pair = LiftingPair(
            lp=Frame(lp, SequenceRole.LOWPASS),
            hp=Frame(hp, SequenceRole.HIGHPASS),
            mv=mv,
            xi_p=xi_values[t][0],
            xi_u=xi_values[t][1],
        )
        o, e = synthesize(pair, hooks)
        odd_frames.append(o)
        even_frames.append(e)
    return interleave(Sequence(tuple(odd_frames)), Sequence(tuple(even_frames)))
