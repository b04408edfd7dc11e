"""Channel synthesis from a prescribed null space."""

from .nullspace import NullspaceSynthesizer

__all__ = ["NullspaceSynthesizer"]
