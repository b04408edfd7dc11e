"""Fixed-point and multiplicative-domain structure of rank-one Kraus channels."""

from .analyzer import StructureAnalyzer

__all__ = ["StructureAnalyzer"]
