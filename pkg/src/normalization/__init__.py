"""Matrix encoding and canonical JSON."""

from .codec import MatrixCodec

__all__ = ["MatrixCodec"]
