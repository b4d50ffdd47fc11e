"""Block-based motion estimation and compensation.

Vectors are integer-pel displacements on a fixed block grid. The warp reads
the reference at position + vector with reads clamped to the frame border,
and the update-step compensation is the same warp with every vector negated.
Estimation is an exhaustive SAD search with a fixed deterministic tie-break,
so encoder runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Frame
from .errors import DimensionMismatch

DEFAULT_BLOCK_SIZE = 8
DEFAULT_SEARCH_RANGE = 8


@dataclass(frozen=True)
class SearchParams:
    block_size: int = DEFAULT_BLOCK_SIZE
    search_range: int = DEFAULT_SEARCH_RANGE

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError("block size must be positive")
        if self.search_range < 0:
            raise ValueError("search range must be non-negative")


@dataclass(frozen=True)
class MotionField:
    """Per-block (dx, dy) displacements for a width x height frame."""

    block_size: int
    width: int
    height: int
    vectors: np.ndarray  # shape (rows, cols, 2), int: [..., 0] = dx, [..., 1] = dy

    def __post_init__(self):
        vec = np.ascontiguousarray(self.vectors, dtype=np.int32)
        rows = -(-self.height // self.block_size)
        cols = -(-self.width // self.block_size)
        if vec.shape != (rows, cols, 2):
            raise ValueError(f"expected vector grid {(rows, cols, 2)}, got {vec.shape}")
        vec.flags.writeable = False
        object.__setattr__(self, "vectors", vec)

    @property
    def rows(self) -> int:
        return self.vectors.shape[0]

    @property
    def cols(self) -> int:
        return self.vectors.shape[1]

    def __eq__(self, other):
        if not isinstance(other, MotionField):
            return NotImplemented
        return (
            self.block_size == other.block_size
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.vectors, other.vectors)
        )


def zero_field(width: int, height: int, block_size: int = DEFAULT_BLOCK_SIZE) -> MotionField:
    rows = -(-height // block_size)
    cols = -(-width // block_size)
    return MotionField(block_size, width, height, np.zeros((rows, cols, 2), dtype=np.int32))


def _candidate_order(search_range: int) -> list[tuple[int, int]]:
    # Tie-break: smallest |dx|+|dy|, then smallest dy, then smallest dx.
    cands = [
        (dx, dy)
        for dy in range(-search_range, search_range + 1)
        for dx in range(-search_range, search_range + 1)
    ]
    cands.sort(key=lambda v: (abs(v[0]) + abs(v[1]), v[1], v[0]))
    return cands


def estimate_motion(reference: Frame, current: Frame, params: SearchParams | None = None) -> MotionField:
    """Exhaustive full search minimizing SAD of each block of ``current``
    against the displaced ``reference`` (border reads clamped)."""
    params = params or SearchParams()
    if not reference.same_dims(current):
        raise DimensionMismatch(
            f"reference {reference.data.shape} vs current {current.data.shape}"
        )
    h, w = current.data.shape
    bs = params.block_size
    r = params.search_range
    rows = -(-h // bs)
    cols = -(-w // bs)

    cur = current.data.astype(np.int64)
    padded = np.pad(reference.data.astype(np.int64), r, mode="edge")
    cands = _candidate_order(r)

    y_edges = np.minimum(np.arange(rows + 1) * bs, h)
    x_edges = np.minimum(np.arange(cols + 1) * bs, w)

    best_sad = np.full((rows, cols), np.iinfo(np.int64).max, dtype=np.int64)
    best_idx = np.zeros((rows, cols), dtype=np.int32)
    for ci, (dx, dy) in enumerate(cands):
        shifted = padded[r + dy : r + dy + h, r + dx : r + dx + w]
        absdiff = np.abs(cur - shifted)
        # integral image -> per-block SAD for the (possibly ragged) block grid
        integral = np.zeros((h + 1, w + 1), dtype=np.int64)
        integral[1:, 1:] = absdiff.cumsum(axis=0).cumsum(axis=1)
        sums = (
            integral[np.ix_(y_edges[1:], x_edges[1:])]
            - integral[np.ix_(y_edges[:-1], x_edges[1:])]
            - integral[np.ix_(y_edges[1:], x_edges[:-1])]
            + integral[np.ix_(y_edges[:-1], x_edges[:-1])]
        )
        better = sums < best_sad  # strict: earlier candidates win ties (pre-sorted)
        best_sad[better] = sums[better]
        best_idx[better] = ci

    cand_arr = np.asarray(cands, dtype=np.int32)
    vectors = cand_arr[best_idx]
    return MotionField(bs, w, h, vectors)


def warp_array(src: np.ndarray, mf: MotionField) -> np.ndarray:
    """Array-level warp: each output block copies the source block at
    position + vector, with out-of-bounds reads clamped to the border."""
    h, w = src.shape
    if (w, h) != (mf.width, mf.height):
        raise DimensionMismatch(f"frame {src.shape} vs field {(mf.height, mf.width)}")
    bs = mf.block_size
    out = np.empty_like(src)
    for by in range(mf.rows):
        y0 = by * bs
        y1 = min(y0 + bs, h)
        for bx in range(mf.cols):
            x0 = bx * bs
            x1 = min(x0 + bs, w)
            dx, dy = mf.vectors[by, bx]
            iy = np.clip(np.arange(y0, y1) + dy, 0, h - 1)
            ix = np.clip(np.arange(x0, x1) + dx, 0, w - 1)
            out[y0:y1, x0:x1] = src[np.ix_(iy, ix)]
    return out


def warp(frame: Frame, mf: MotionField) -> Frame:
    """Frame-level wrapper around :func:`warp_array`."""
    return Frame(warp_array(frame.data, mf), frame.role)


def invert(mf: MotionField) -> MotionField:
    """Compensation for the update step: same block grid, negated vectors."""
    return MotionField(mf.block_size, mf.width, mf.height, -mf.vectors)


def serialize_raw(mf: MotionField) -> bytes:
    """Uncompressed layout: block size u8, cols u16, rows u16, then per-block
    (dx i8, dy i8) in raster order. Frame dimensions travel separately."""
    if np.abs(mf.vectors).max(initial=0) > 127:
        raise ValueError("vectors exceed the i8 raw layout")
    head = np.array([mf.block_size], dtype=np.uint8).tobytes()
    counts = np.array([mf.cols, mf.rows], dtype="<u2").tobytes()
    return head + counts + mf.vectors.astype(np.int8).tobytes()


def deserialize_raw(data: bytes, width: int, height: int) -> MotionField:
    if len(data) < 5:
        raise ValueError("raw motion field shorter than its header")
    block_size = data[0]
    cols, rows = np.frombuffer(data[1:5], dtype="<u2")
    need = 5 + rows * cols * 2
    if len(data) != need:
        raise ValueError(f"raw motion field is {len(data)} bytes, expected {need}")
    vectors = (
        np.frombuffer(data[5:], dtype=np.int8).astype(np.int32).reshape(int(rows), int(cols), 2)
    )
    return MotionField(int(block_size), width, height, vectors)
