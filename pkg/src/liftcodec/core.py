"""Domain types, sequence file I/O, and the synthetic phantom generator.

Frames are 2-D integer sample grids. Original material is 12-bit unsigned
(0..4095); temporal highpass frames are signed; temporal lowpass frames can
exceed 12 bits and are deliberately NOT clamped (clamping would break perfect
reconstruction), so they live in signed 16-bit headroom.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import BadHeader, DimensionMismatch, OddLengthSequence, TruncatedFile

MAX_SAMPLE = 4095  # 2**12 - 1
SEQ_MAGIC = b"SEQ0"
SEQ_HEADER_SIZE = 32
SEQ_HEADER_FMT = "<4sIIII"  # magic, width, height, T, bitdepth (padded to 32)


class SequenceRole(enum.Enum):
    ORIGINAL = "original"
    LOWPASS = "lowpass"
    HIGHPASS = "highpass"


@dataclass(frozen=True)
class Frame:
    """One 2-D image of integer samples, tagged with its codec role."""

    data: np.ndarray
    role: SequenceRole = SequenceRole.ORIGINAL

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.int32)
        if arr.ndim != 2:
            raise ValueError(f"frame data must be 2-D, got shape {arr.shape}")
        # originals are strictly 12-bit; lowpass/highpass frames keep signed
        # 16-bit headroom (clamping them would break perfect reconstruction)
        if self.role is SequenceRole.ORIGINAL and arr.size:
            if arr.min() < 0 or arr.max() > MAX_SAMPLE:
                raise ValueError(f"original samples must lie in [0, {MAX_SAMPLE}]")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def same_dims(self, other: "Frame") -> bool:
        return self.data.shape == other.data.shape

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.role is other.role and np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class Sequence:
    """An ordered list of equally sized frames."""

    frames: tuple[Frame, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("sequence must contain at least one frame")
        shape = frames[0].data.shape
        for f in frames[1:]:
            if f.data.shape != shape:
                raise DimensionMismatch(
                    f"all frames must share dimensions, got {shape} and {f.data.shape}"
                )
        object.__setattr__(self, "frames", frames)

    @property
    def T(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.T == other.T and all(a == b for a, b in zip(self.frames, other.frames))


def split(seq: Sequence) -> tuple[Sequence, Sequence]:
    """Split into odd-indexed and even-indexed frames (1-indexed convention).

    The frame at 1-indexed position 2t-1 goes to the odd half and position 2t
    to the even half, so the first frame of the sequence is odd.
    """
    if seq.T % 2 != 0:
        raise OddLengthSequence(f"cannot split a sequence of {seq.T} frames into pairs")
    return Sequence(seq.frames[0::2]), Sequence(seq.frames[1::2])


def interleave(odd: Sequence, even: Sequence) -> Sequence:
    """Inverse of :func:`split`."""
    if odd.T != even.T:
        raise DimensionMismatch(f"halves differ in length: {odd.T} vs {even.T}")
    frames = []
    for o, e in zip(odd.frames, even.frames):
        frames.append(o)
        frames.append(e)
    return Sequence(tuple(frames))


@dataclass(frozen=True)
class PhantomSpec:
    """Parameters of the synthetic moving-ellipse test sequence.

    ``motion`` is the integer per-frame translation of the foreground; frame t
    (0-indexed) is displaced by t * motion from the first frame.  ``sigma`` is
    the additive Gaussian noise level in sample units; ``corr_radius`` spreads
    that noise spatially with a kernel of that support radius (0 keeps it
    white). Ellipses get a short anti-aliased intensity ramp at the boundary,
    like reconstructed tomography content rather than a binary mask.
    """

    width: int = 64
    height: int = 64
    frames: int = 16
    motion: tuple[int, int] = (1, 0)  # (dx, dy) pixels per frame
    sigma: float = 0.0
    corr_radius: int = 0
    background: int = 600
    edge_width: float = 2.0  # pixels of boundary ramp
    texture_amp: float = 0.0  # std of a smooth anatomy-like field
    texture_scale: int = 5  # support radius of the texture correlation
    global_motion: bool = False  # move the texture with the ellipses (pan)
    ellipses: tuple[tuple[float, float, float, float, int], ...] = field(
        # (cx, cy, rx, ry) as fractions of (width, height), then intensity;
        # soft-tissue-like contrasts, not binary masks
        default=(
            (0.40, 0.45, 0.26, 0.20, 1050),
            (0.60, 0.55, 0.12, 0.16, 880),
            (0.52, 0.32, 0.07, 0.07, 1350),
        )
    )

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.frames < 1:
            raise ValueError("phantom dimensions must be positive")
        if self.sigma < 0:
            raise ValueError("noise sigma must be non-negative")
        if self.corr_radius < 0:
            raise ValueError("correlation radius must be non-negative")
        if self.edge_width <= 0:
            raise ValueError("edge width must be positive")
        if self.texture_amp < 0 or self.texture_scale < 1:
            raise ValueError("texture parameters out of range")


def _correlation_taps(radius: int) -> np.ndarray:
    """Unit-sum Gaussian kernel with support radius ``radius`` (sigma r/3)."""
    sigma = radius / 3.0
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-0.5 * (k / sigma) ** 2)
    return taps / taps.sum()


def _correlate_noise(noise: np.ndarray, radius: int) -> np.ndarray:
    """Spatially correlate white noise, preserving its marginal variance.

    A unit-sum smoothing kernel shrinks the variance by the sum of its
    squared weights, so the result is rescaled to keep the planted sigma
    meaningful for correlated phantoms.
    """
    taps = _correlation_taps(radius)
    r = (len(taps) - 1) // 2
    padded = np.pad(noise, r, mode="edge")
    rows = np.zeros_like(padded)
    for i, w in enumerate(taps):
        rows += w * np.roll(padded, r - i, axis=1)
    out = np.zeros_like(padded)
    for i, w in enumerate(taps):
        out += w * np.roll(rows, r - i, axis=0)
    out = out[r:-r, r:-r]
    return out / float(np.sum(taps**2))


def _render_clean(spec: PhantomSpec, t: int) -> np.ndarray:
    ys, xs = np.mgrid[0 : spec.height, 0 : spec.width]
    img = np.full((spec.height, spec.width), spec.background, dtype=np.float64)
    dx, dy = spec.motion
    for cx, cy, rx, ry, value in spec.ellipses:
        cx_t = cx * spec.width + t * dx
        cy_t = cy * spec.height + t * dy
        ax = max(rx * spec.width, 0.5)
        ay = max(ry * spec.height, 0.5)
        dist = np.sqrt(((xs - cx_t) / ax) ** 2 + ((ys - cy_t) / ay) ** 2)
        r_eff = math.sqrt(ax * ay)
        coverage = np.clip((1.0 - dist) * r_eff / spec.edge_width + 0.5, 0.0, 1.0)
        img = img * (1.0 - coverage) + value * coverage
    return img


def generate_phantom(spec: PhantomSpec, seed: int) -> Sequence:
    """Deterministic moving-ellipse sequence with optional correlated noise
    and an optional static textured background (block matching on real scans
    locks onto anatomy; a flat phantom would make it fit the noise)."""
    rng = np.random.default_rng(seed)
    shape = (spec.height, spec.width)
    texture = None
    if spec.texture_amp > 0:
        if spec.global_motion:
            # pan over one larger static field so the translation is exact
            # everywhere and borders reveal genuinely new content
            span_x = abs(spec.motion[0]) * (spec.frames - 1)
            span_y = abs(spec.motion[1]) * (spec.frames - 1)
            big = _correlate_noise(
                rng.standard_normal((spec.height + span_y, spec.width + span_x))
                * spec.texture_amp,
                spec.texture_scale,
            )
        else:
            big = _correlate_noise(
                rng.standard_normal(shape) * spec.texture_amp, spec.texture_scale
            )
        texture = big
    frames = []
    for t in range(spec.frames):
        img = _render_clean(spec, t)
        if texture is not None:
            if spec.global_motion:
                dx, dy = spec.motion
                span_x = abs(dx) * (spec.frames - 1)
                span_y = abs(dy) * (spec.frames - 1)
                # window slides against the motion so scene content moves
                # by +motion per frame, matching the ellipses
                x0 = span_x - t * dx if dx >= 0 else -t * dx
                y0 = span_y - t * dy if dy >= 0 else -t * dy
                img = img + texture[y0 : y0 + spec.height, x0 : x0 + spec.width]
            else:
                img = img + texture
        if spec.sigma > 0:
            noise = rng.standard_normal(shape) * spec.sigma
            if spec.corr_radius > 0:
                noise = _correlate_noise(noise, spec.corr_radius)
            img = img + noise
        samples = np.clip(np.rint(img), 0, MAX_SAMPLE).astype(np.int32)
        frames.append(Frame(samples))
    return Sequence(tuple(frames))


def write_sequence(path, seq: Sequence, bitdepth: int = 12) -> None:
    """Write a raw little-endian 16-bit sequence container."""
    header = struct.pack(SEQ_HEADER_FMT, SEQ_MAGIC, seq.width, seq.height, seq.T, bitdepth)
    header = header.ljust(SEQ_HEADER_SIZE, b"\x00")
    with open(path, "wb") as fh:
        fh.write(header)
        for frame in seq.frames:
            fh.write(frame.data.astype("<u2").tobytes())


def read_sequence(path) -> Sequence:
    """Read a container written by :func:`write_sequence`; round trips bit-exactly."""
    with open(path, "rb") as fh:
        header = fh.read(SEQ_HEADER_SIZE)
        if len(header) < SEQ_HEADER_SIZE:
            raise TruncatedFile(f"header is {len(header)} bytes, expected {SEQ_HEADER_SIZE}")
        magic, width, height, count, _bitdepth = struct.unpack_from(SEQ_HEADER_FMT, header)
        if magic != SEQ_MAGIC:
            raise BadHeader(f"bad magic {magic!r}, expected {SEQ_MAGIC!r}")
        if width < 1 or height < 1 or count < 1:
            raise BadHeader(f"implausible dimensions {width}x{height}x{count}")
        payload = fh.read(2 * width * height * count)
        if len(payload) < 2 * width * height * count:
            raise TruncatedFile(
                f"payload is {len(payload)} bytes, expected {2 * width * height * count}"
            )
    samples = np.frombuffer(payload, dtype="<u2").astype(np.int32)
    frames = tuple(
        Frame(samples[i * width * height : (i + 1) * width * height].reshape(height, width))
        for i in range(count)
    )
    return Sequence(frames)
