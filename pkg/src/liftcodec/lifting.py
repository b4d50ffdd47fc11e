"""Integer Haar temporal lifting with denoising filters inside both steps.

Analysis of one frame pair:

    HP = even - floor( DN_P( warp(odd, mv) ) )
    LP = odd  + floor( 0.5 * DN_U( warp(HP, -mv) ) )

Synthesis recovers odd first (the update term needs only LP, HP and mv),
then even; because the decoder recomputes the identical denoised terms
before the identical floors, reconstruction is bit-exact for every filter
and every strength. With both filters off this is plain motion-compensated
temporal filtering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import denoise, motion
from .core import Frame, Sequence, SequenceRole, interleave, split
from .denoise import KG_DEFAULT, DenoiserKind
from .errors import DimensionMismatch
from .motion import MotionField


@dataclass(frozen=True)
class DenoiseHooks:
    """Filter configuration for one lifting step pair; xi == 0 disables the
    corresponding filter entirely."""

    kind: DenoiserKind = DenoiserKind.GAUSSIAN
    xi_p: int = 0
    xi_u: int = 0
    kg: float = KG_DEFAULT

    def __post_init__(self):
        if self.xi_p < 0 or self.xi_u < 0:
            raise ValueError("noise parameters must be non-negative")

    @classmethod
    def off(cls) -> "DenoiseHooks":
        return cls()


@dataclass(frozen=True)
class LiftingPair:
    """Everything one lifting step produces (and the decoder consumes)."""

    lp: Frame
    hp: Frame
    mv: MotionField
    xi_p: int
    xi_u: int


def _denoised(data: np.ndarray, xi: int, kind: DenoiserKind, kg: float) -> np.ndarray:
    """DN applied to a post-warp frame; the noise variance is estimated from
    the filter input itself so the decoder can recompute it."""
    if xi == 0:
        return data
    if data.shape[0] < 3 or data.shape[1] < 3:
        # too small for the noise estimator; treat as noiseless
        return data
    h = denoise.filter_strength(xi, denoise.estimate_noise(data))
    return denoise.apply_denoiser(data, kind, h, kg)


def _floor_int(values: np.ndarray) -> np.ndarray:
    if np.issubdtype(values.dtype, np.integer):
        return values.astype(np.int32)
    return np.floor(values).astype(np.int32)


def predict_term_from_warped(
    warped_odd: np.ndarray, xi_p: int, kind: DenoiserKind, kg: float
) -> np.ndarray:
    """floor(DN_P(warped odd)) for an already motion-compensated frame."""
    return _floor_int(np.asarray(_denoised(warped_odd, xi_p, kind, kg)))


def update_term_from_warped(
    warped_hp: np.ndarray, xi_u: int, kind: DenoiserKind, kg: float
) -> np.ndarray:
    """floor(0.5 * DN_U(warped hp)) for an already inverse-compensated frame."""
    dn = np.asarray(_denoised(warped_hp, xi_u, kind, kg), dtype=np.float64)
    return np.floor(0.5 * dn).astype(np.int32)


def predict_term(odd_data: np.ndarray, mv: MotionField, hooks: DenoiseHooks) -> np.ndarray:
    """floor(DN_P(warp(odd))) — shared verbatim by analyze and synthesize."""
    warped = motion.warp_array(odd_data, mv)
    return predict_term_from_warped(warped, hooks.xi_p, hooks.kind, hooks.kg)


def update_term(hp_data: np.ndarray, mv: MotionField, hooks: DenoiseHooks) -> np.ndarray:
    """floor(0.5 * DN_U(warp(hp, -mv))) — shared verbatim by both directions."""
    warped = motion.warp_array(hp_data, motion.invert(mv))
    return update_term_from_warped(warped, hooks.xi_u, hooks.kind, hooks.kg)


def analyze(odd: Frame, even: Frame, mv: MotionField, hooks: DenoiseHooks | None = None) -> LiftingPair:
    if not odd.same_dims(even):
        raise DimensionMismatch(f"odd {odd.data.shape} vs even {even.data.shape}")
    if (mv.width, mv.height) != (odd.width, odd.height):
        raise DimensionMismatch("motion field does not match frame dimensions")
    hooks = hooks or DenoiseHooks.off()
    hp = even.data - predict_term(odd.data, mv, hooks)
    lp = odd.data + update_term(hp, mv, hooks)
    return LiftingPair(
        lp=Frame(lp, SequenceRole.LOWPASS),
        hp=Frame(hp, SequenceRole.HIGHPASS),
        mv=mv,
        xi_p=hooks.xi_p,
        xi_u=hooks.xi_u,
    )


def synthesize(pair: LiftingPair, hooks: DenoiseHooks | None = None) -> tuple[Frame, Frame]:
    """Exact inverse of :func:`analyze`; ``hooks`` must match the analysis
    configuration (same kind, same kg — the xi values travel in the pair)."""
    hooks = hooks or DenoiseHooks.off()
    hooks = DenoiseHooks(kind=hooks.kind, xi_p=pair.xi_p, xi_u=pair.xi_u, kg=hooks.kg)
    odd = pair.lp.data - update_term(pair.hp.data, pair.mv, hooks)
    even = pair.hp.data + predict_term(odd, pair.mv, hooks)
    return Frame(odd), Frame(even)


def analyze_sequence(
    seq: Sequence,
    hooks_per_pair: list[DenoiseHooks] | DenoiseHooks | None = None,
    search: motion.SearchParams | None = None,
    fields: list[MotionField] | None = None,
) -> list[LiftingPair]:
    """One temporal decomposition level over the whole sequence.

    Motion is estimated per pair (odd frame as reference) unless explicit
    fields are supplied.
    """
    odd, even = split(seq)
    n = odd.T
    if hooks_per_pair is None:
        hooks_list = [DenoiseHooks.off()] * n
    elif isinstance(hooks_per_pair, DenoiseHooks):
        hooks_list = [hooks_per_pair] * n
    else:
        hooks_list = list(hooks_per_pair)
        if len(hooks_list) != n:
            raise ValueError(f"need {n} hook sets, got {len(hooks_list)}")
    pairs = []
    for t in range(n):
        mv = fields[t] if fields is not None else motion.estimate_motion(
            odd.frames[t], even.frames[t], search
        )
        pairs.append(analyze(odd.frames[t], even.frames[t], mv, hooks_list[t]))
    return pairs


def synthesize_sequence(pairs: list[LiftingPair], hooks: DenoiseHooks | None = None) -> Sequence:
    odd_frames = []
    even_frames = []
    for pair in pairs:
        o, e = synthesize(pair, hooks)
        odd_frames.append(o)
        even_frames.append(e)
    return interleave(Sequence(tuple(odd_frames)), Sequence(tuple(even_frames)))
