"""Dense complex linear algebra primitives."""

from .spectral import SpectralSolver
from .tensor import (
    check_shape,
    commutator,
    dagger,
    frobenius,
    hermitian_basis,
    matrix_unit,
    pairwise_commutator_residual,
    partial_trace_second,
    projection_residuals,
    relative_commutator_residual,
    tensor_product,
)

__all__ = [
    "SpectralSolver",
    "check_shape",
    "commutator",
    "dagger",
    "frobenius",
    "hermitian_basis",
    "matrix_unit",
    "pairwise_commutator_residual",
    "partial_trace_second",
    "projection_residuals",
    "relative_commutator_residual",
    "tensor_product",
]
