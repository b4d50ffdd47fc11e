"""End-to-end encode/decode paths tying motion, lifting, RDO, and the
container together."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rdo
from .coding import container, dwt, entropy
from .core import Sequence, split
from .denoise import KG_DEFAULT, DenoiserKind
from .lifting import DenoiseHooks, LiftingPair, analyze
from .motion import SearchParams, estimate_motion

MODE_MCTF = container.MODE_MCTF
MODE_FIXED_XI = container.MODE_FIXED_XI
MODE_RDO = container.MODE_RDO


@dataclass(frozen=True)
class EncoderConfig:
    """One knob set for the whole stream. ``mode`` selects how the per-pair
    noise parameters are chosen: all-zero (plain MCTF), one fixed value, or
    the Lagrangian ring search."""

    mode: int = MODE_MCTF
    fixed_xi: int = 0
    lam: float = rdo.LAMBDA_BASE
    kind: DenoiserKind = DenoiserKind.GAUSSIAN
    kg: float = KG_DEFAULT
    block_size: int = 8
    search_range: int = 8
    xi_max: int = rdo.XI_MAX_DEFAULT

    def __post_init__(self):
        if self.mode not in (MODE_MCTF, MODE_FIXED_XI, MODE_RDO):
            raise ValueError(f"unknown mode {self.mode}")
        if not 0 <= self.fixed_xi <= entropy.XI_CAP:
            raise ValueError(f"fixed xi outside [0, {entropy.XI_CAP}]")
        if self.mode == MODE_RDO and not self.lam > 0:
            raise ValueError("lambda must be positive")


@dataclass
class PairRecord:
    pair: LiftingPair
    search: rdo.RingSearchResult | None
    mv_bytes: int = 0
    lp_bytes: int = 0
    hp_bytes: int = 0

    @property
    def payload_bytes(self) -> int:
        return self.mv_bytes + self.lp_bytes + self.hp_bytes


@dataclass
class EncodeResult:
    stream: bytes
    header: container.StreamHeader
    records: list[PairRecord] = field(default_factory=list)
    xi_section_bytes: int = 0

    @property
    def xi_values(self) -> list[tuple[int, int]]:
        return [(r.pair.xi_p, r.pair.xi_u) for r in self.records]


def encode_sequence(seq: Sequence, config: EncoderConfig | None = None) -> EncodeResult:
    """Run the selected mode over every pair and mux the stream."""
    config = config or EncoderConfig()
    search = SearchParams(config.block_size, config.search_range)
    odd, even = split(seq)
    records: list[PairRecord] = []
    for t in range(odd.T):
        mv = estimate_motion(odd.frames[t], even.frames[t], search)
        result = None
        if config.mode == MODE_RDO:
            result = rdo.ring_search(
                odd.frames[t], even.frames[t], mv, config.kind, config.lam, config.xi_max, config.kg
            )
            xi_p, xi_u = result.chosen.xi_p, result.chosen.xi_u
        elif config.mode == MODE_FIXED_XI:
            xi_p = xi_u = config.fixed_xi
        else:
            xi_p = xi_u = 0
        hooks = DenoiseHooks(kind=config.kind, xi_p=xi_p, xi_u=xi_u, kg=config.kg)
        records.append(PairRecord(pair=analyze(odd.frames[t], even.frames[t], mv, hooks), search=result))

    mode_param = 0.0
    if config.mode == MODE_FIXED_XI:
        mode_param = float(config.fixed_xi)
    elif config.mode == MODE_RDO:
        mode_param = float(config.lam)
    header = container.StreamHeader(
        width=seq.width,
        height=seq.height,
        frame_count=seq.T,
        bitdepth=12,
        kind=config.kind,
        kg=config.kg,
        block_size=config.block_size,
        spatial_levels=dwt.levels_for(seq.width, seq.height),
        mode=config.mode,
        mode_param=mode_param,
    )
    byte_counts: list[dict] = [{} for _ in records]
    stream, xi_blob_len = container.mux_accounted(
        [r.pair for r in records], header, byte_counts
    )
    for record, counts in zip(records, byte_counts):
        record.mv_bytes = counts["mv"]
        record.lp_bytes = counts["lp"]
        record.hp_bytes = counts["hp"]
    return EncodeResult(stream=stream, header=header, records=records, xi_section_bytes=xi_blob_len)


def decode_sequence(data: bytes) -> Sequence:
    return container.demux(data)
