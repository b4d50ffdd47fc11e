"""liftcodec: lossless coding of 12-bit image sequences by motion-compensated
Haar lifting with in-loop denoising and rate-distortion optimized filter
strengths."""

__version__ = "0.1.0"

from .core import Frame, PhantomSpec, Sequence, SequenceRole, generate_phantom

__all__ = [
    "Frame",
    "Sequence",
    "SequenceRole",
    "PhantomSpec",
    "generate_phantom",
    "__version__",
]
