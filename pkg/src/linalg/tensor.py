"""Tensor-product and basis helpers.

Bipartite operators use the convention that the first factor is indexed
slowest, so entry ((i, m), (j, n)) of a (da*db)-square matrix lives at
row i*db + m, column j*db + n.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def check_shape(x, shape, name: str) -> np.ndarray:
    """Coerce x to a complex array of the given shape."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != tuple(shape):
        raise DimensionMismatch(
            f"{name} has shape {x.shape}, expected {tuple(shape)}",
            {'shape': list(x.shape), 'expected': list(shape)},
        )
    return x


def matrix_unit(dim: int, i: int, j: int, cols: Optional[int] = None) -> np.ndarray:
    """e_i e_j* (0-based indices)."""
    unit = np.zeros((dim, dim if cols is None else cols), dtype=np.complex128)
    unit[i, j] = 1.0
    return unit


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; block (i, j) equals a[i, j] * b."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def partial_trace_second(x: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """
    Trace out the second (fastest-indexed) factor.

    Args:
        x: (dim_a*dim_b) square matrix
        dim_a: Dimension of the kept factor
        dim_b: Dimension of the traced factor

    Returns:
        dim_a x dim_a matrix with entries sum_m x[(i,m),(j,m)]
    """
    x = np.asarray(x)
    size = dim_a * dim_b
    if dim_a <= 0 or dim_b <= 0 or x.shape != (size, size):
        raise DimensionMismatch(
            f"expected a {size}x{size} matrix for dims {dim_a}x{dim_b}, got {x.shape}",
            {'shape': list(x.shape), 'dim_a': dim_a, 'dim_b': dim_b},
        )
    return np.einsum('imjm->ij', x.reshape(dim_a, dim_b, dim_a, dim_b))


def hermitian_basis(dim: int) -> List[np.ndarray]:
    """
    Hilbert-Schmidt orthonormal basis of the real space of dim x dim Hermitian matrices.

    Order: diagonal units, then for each i < j the symmetric and the
    antisymmetric imaginary element.
    """
    basis = [matrix_unit(dim, i, i) for i in range(dim)]
    scale = 1.0 / np.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            sym = (matrix_unit(dim, i, j) + matrix_unit(dim, j, i)) * scale
            anti = 1j * (matrix_unit(dim, i, j) - matrix_unit(dim, j, i)) * scale
            basis.extend([sym, anti])
    return basis


def hermitian_to_real(h: np.ndarray) -> np.ndarray:
    """Real coordinates whose dot product equals Tr(A B) for Hermitian A, B."""
    flat = np.asarray(h).reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def hermitian_residual(a: np.ndarray) -> float:
    return frobenius(a - dagger(a))


def projection_residuals(p: np.ndarray) -> Tuple[float, float]:
    """(||P - P*||_F, ||P^2 - P||_F)."""
    return hermitian_residual(p), frobenius(p @ p - p)


def pairwise_commutator_residual(
    family: Sequence[np.ndarray],
) -> Tuple[float, Tuple[int, int]]:
    """
    Largest ||[A, B]||_F over pairs of the family.

    The scan order is fixed (row by row), so the reported argmax is deterministic.

    Returns:
        (residual, (p, q)) with 0-based member indices; (0.0, (0, 0)) for fewer than two
    """
    stack = np.asarray(family, dtype=np.complex128)
    worst, where = 0.0, (0, 0)
    for p in range(len(stack) - 1):
        rest = stack[p + 1:]
        comm = stack[p] @ rest - rest @ stack[p]
        norms = np.linalg.norm(comm, axis=(1, 2))
        q = int(np.argmax(norms))
        if norms[q] > worst:
            worst, where = float(norms[q]), (p, p + 1 + q)
    return worst, where


def relative_commutator_residual(
    family: Sequence[np.ndarray],
) -> Tuple[float, float, Optional[Tuple[int, int]]]:
    """
    Largest ||[A, B]||_F / (1 + ||A||_F ||B||_F) over pairs of the family.

    Returns:
        (relative residual, raw ||[A, B]||_F of that pair, (p, q) 0-based or None)
    """
    stack = np.asarray(family, dtype=np.complex128)
    norms = np.linalg.norm(stack, axis=(1, 2)) if len(stack) else np.zeros(0)
    worst, worst_raw, where = 0.0, 0.0, None
    for p in range(len(stack) - 1):
        rest = stack[p + 1:]
        raw = np.linalg.norm(stack[p] @ rest - rest @ stack[p], axis=(1, 2))
        relative = raw / (1.0 + norms[p] * norms[p + 1:])
        q = int(np.argmax(relative))
        if relative[q] > worst:
            worst, worst_raw, where = float(relative[q]), float(raw[q]), (p, p + 1 + q)
    return worst, worst_raw, where
