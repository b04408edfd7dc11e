"""Commutative-range dilation of measure-and-prepare channels."""

from .dilator import CommutativeDilator

__all__ = ["CommutativeDilator"]
