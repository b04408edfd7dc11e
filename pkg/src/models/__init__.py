"""Data models for channels, decompositions and reports."""

from .schema import (
    Channel,
    DilationResult,
    EigDecomposition,
    HolevoChannel,
    KrausChannel,
    NullspaceChannel,
    RankOneKraus,
    SebDecomposition,
    SebTerm,
    SubspaceSpec,
    Tolerances,
    WeightedChoi,
)
from .reports import (
    CommutantReport,
    CptpReport,
    DilationReport,
    EigenStructureEntry,
    FixedPointReport,
    MultiplicativeDomainReport,
    NormReport,
    NullspaceReport,
    RangeCommutativityReport,
    Report,
    SeparableDecompositionReport,
    ValidationResult,
)

__all__ = [
    "Channel",
    "DilationResult",
    "EigDecomposition",
    "HolevoChannel",
    "KrausChannel",
    "NullspaceChannel",
    "RankOneKraus",
    "SebDecomposition",
    "SebTerm",
    "SubspaceSpec",
    "Tolerances",
    "WeightedChoi",
    "CommutantReport",
    "CptpReport",
    "DilationReport",
    "EigenStructureEntry",
    "FixedPointReport",
    "MultiplicativeDomainReport",
    "NormReport",
    "NullspaceReport",
    "RangeCommutativityReport",
    "Report",
    "SeparableDecompositionReport",
    "ValidationResult",
]
