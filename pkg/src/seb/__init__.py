"""Commutative-range analysis and separable decomposition."""

from .analyzer import SebAnalyzer

__all__ = ["SebAnalyzer"]
