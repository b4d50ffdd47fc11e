"""Exception types shared across the codec."""


class CodecError(Exception):
    """Base class for all liftcodec errors."""


class OddLengthSequence(CodecError):
    """A temporal operation needs an even frame count."""


class DimensionMismatch(CodecError):
    """Two frames (or a frame and a motion field) disagree on dimensions."""


class FrameTooSmall(CodecError):
    """The frame is below the minimum size an operation supports."""


class BadHeader(CodecError):
    """A container header is malformed (wrong magic, bad field values)."""


class TruncatedFile(CodecError):
    """A raw sequence file ended before the declared payload."""


class TruncatedStream(CodecError):
    """A codec bitstream ended before a declared payload boundary."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at byte {offset})")
        self.offset = offset


class CorruptStream(CodecError):
    """A codec bitstream decoded to structurally impossible values."""


class XiOverCap(CodecError):
    """A noise parameter exceeds the coder's hard cap."""


class NoOverlap(CodecError):
    """Two rate-distortion curves share no quality range."""
