"""Bit production: spatial wavelet, arithmetic coding, payload and container
formats."""

from .arith import ContextSet, RangeDecoder, RangeEncoder
from .container import (
    MODE_FIXED_XI,
    MODE_MCTF,
    MODE_RDO,
    StreamHeader,
    demux,
    mux,
)
from .dwt import levels_for, spatial_forward, spatial_inverse, subband_rects
from .entropy import (
    XI_CAP,
    decode_frame_payload,
    decode_mv,
    decode_subband,
    decode_xi_pairs,
    encode_frame_payload,
    encode_mv,
    encode_subband,
    encode_xi_pairs,
)

__all__ = [
    "ContextSet",
    "RangeEncoder",
    "RangeDecoder",
    "StreamHeader",
    "MODE_MCTF",
    "MODE_FIXED_XI",
    "MODE_RDO",
    "mux",
    "demux",
    "levels_for",
    "spatial_forward",
    "spatial_inverse",
    "subband_rects",
    "encode_subband",
    "decode_subband",
    "encode_frame_payload",
    "decode_frame_payload",
    "encode_mv",
    "decode_mv",
    "encode_xi_pairs",
    "decode_xi_pairs",
    "XI_CAP",
]
