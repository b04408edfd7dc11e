"""Hermitian spectral routines with residual certification.

This module owns the eigensolver wrapper, PSD square roots, norm reports
and the joint diagonalization of commuting families that the commutative
range decomposition rests on.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from ..config import Config
from ..errors import (
    DiagonalizationFailure,
    DimensionMismatch,
    NotCommutingFamily,
    NotHermitian,
    NotPSD,
    NumericalFailure,
)
from ..models.reports import NormReport
from ..models.schema import EigDecomposition, Tolerances
from .tensor import dagger, frobenius, hermitian_residual, relative_commutator_residual


def _first_nonzero(col: np.ndarray, cutoff: float) -> int:
    hits = np.flatnonzero(np.abs(col) > cutoff)
    return int(hits[0]) if hits.size else 0


def _phase_normalize(vectors: np.ndarray, cutoff: float) -> np.ndarray:
    """Rotate each column so its first nonzero entry is real positive."""
    out = np.array(vectors, dtype=np.complex128, copy=True)
    for k in range(out.shape[1]):
        lead = out[_first_nonzero(out[:, k], cutoff), k]
        if abs(lead) > 0:
            out[:, k] *= np.conj(lead) / abs(lead)
    return out


class SpectralSolver:
    """
    Eigen-decompositions, square roots and joint diagonalization.

    All checks use the tolerances given at construction.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the solver.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    @staticmethod
    def _square(a, name: str = "a") -> np.ndarray:
        a = np.asarray(a, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"{name} must be square, got shape {a.shape}",
                                    {'shape': list(a.shape)})
        return a

    def eigh(self, a) -> EigDecomposition:
        """
        Eigen-decompose a Hermitian matrix.

        Eigenvalues are returned in descending order; within numerically tied
        eigenvalues, columns are ordered by the position and size of their
        first nonzero entry after phase normalization.

        Args:
            a: Hermitian matrix

        Returns:
            EigDecomposition with unitary eigenvector columns

        Raises:
            NotHermitian: If ||a - a*||_F exceeds eps_herm * (1 + ||a||_F)
            NumericalFailure: If LAPACK does not converge
        """
        a = self._square(a)
        scale = 1.0 + frobenius(a)
        residual = hermitian_residual(a)
        if residual > self.tol.eps_herm * scale:
            raise NotHermitian(
                f"Hermiticity residual {residual:.3e} exceeds bound",
                {'residual': residual, 'bound': self.tol.eps_herm * scale},
            )

        try:
            w, v = scipy.linalg.eigh((a + dagger(a)) / 2.0)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise NumericalFailure(f"Eigensolver did not converge: {e}")

        v = _phase_normalize(v, self.tol.eps_rank)
        order = self._canonical_order(w, v, scale)
        return EigDecomposition(eigenvalues=w[order], eigenvectors=v[:, order])

    def _canonical_order(self, w: np.ndarray, v: np.ndarray, scale: float) -> List[int]:
        descending = list(np.argsort(-w, kind='stable'))
        gap = self.tol.eps_rank * scale
        order: List[int] = []
        start = 0
        while start < len(descending):
            stop = start + 1
            while stop < len(descending) and w[descending[stop - 1]] - w[descending[stop]] < gap:
                stop += 1
            tied = descending[start:stop]

            def key(k):
                lead = _first_nonzero(v[:, k], self.tol.eps_rank)
                return (lead, -abs(v[lead, k]))

            order.extend(sorted(tied, key=key))
            start = stop
        return order

    def lambda_min(self, a) -> float:
        """Smallest eigenvalue of the Hermitian part of a."""
        a = self._square(a)
        return float(scipy.linalg.eigvalsh((a + dagger(a)) / 2.0)[0])

    def psd_sqrt(self, a) -> np.ndarray:
        """
        Principal square root of a PSD matrix.

        Eigenvalues in [-eps_psd, 0) are clamped to zero.

        Raises:
            NotPSD: If the smallest eigenvalue is below -eps_psd
        """
        dec = self.eigh(a)
        w = dec.eigenvalues
        if w[-1] < -self.tol.eps_psd:
            raise NotPSD(
                f"Smallest eigenvalue {w[-1]:.3e} is below -eps_psd",
                {'lambda_min': float(w[-1]), 'eps_psd': self.tol.eps_psd},
            )
        v = dec.eigenvectors
        root = (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)
        return (root + dagger(root)) / 2.0

    def norms_and_psd_check(self, a) -> NormReport:
        """Frobenius, trace and operator norms plus positivity of a."""
        a = np.asarray(a, dtype=np.complex128)
        singular = scipy.linalg.svdvals(a)
        frob = frobenius(a)
        square = a.ndim == 2 and a.shape[0] == a.shape[1]

        lam_min = None
        is_hermitian = False
        is_psd = False
        if square:
            is_hermitian = hermitian_residual(a) <= self.tol.eps_herm * (1.0 + frob)
            lam_min = self.lambda_min(a)
            is_psd = bool(is_hermitian and lam_min >= -self.tol.eps_psd)

        return NormReport(
            frobenius=frob,
            trace_norm=float(singular.sum()),
            operator_norm=float(singular.max()) if singular.size else 0.0,
            lambda_min=lam_min,
            is_hermitian=bool(is_hermitian),
            is_psd=is_psd,
        )

    def simultaneous_diagonalize(self, family: Sequence[np.ndarray], seed: int) -> np.ndarray:
        """
        Find one unitary that diagonalizes a commuting family of normal matrices.

        A seeded random real combination of the Hermitian generators
        (M + M*)/2 and (M - M*)/(2i) is diagonalized; degenerate eigenspaces
        are refined with fresh combinations, at most len(family) levels deep.
        The result is certified by the off-diagonal residual of every member.

        Args:
            family: Square matrices of equal dimension
            seed: Seed for the random combinations

        Returns:
            Unitary U (columns phase-normalized and ordered by dominant row)

        Raises:
            NotCommutingFamily: If ||[A, B]|| / (1 + ||A|| ||B||) exceeds eps_comm for some pair
            DiagonalizationFailure: If a rotated member keeps off-diagonal mass
        """
        if len(family) == 0:
            raise DimensionMismatch("family must be non-empty")
        stack = np.asarray([self._square(m, "family member") for m in family])
        if len({m.shape for m in stack}) != 1:
            raise DimensionMismatch("family members differ in dimension")
        dim = stack.shape[1]

        norms = np.linalg.norm(stack, axis=(1, 2))
        top = np.sort(norms)[::-1]
        # same relative normalization as the range commutativity test
        worst, raw, pair = relative_commutator_residual(stack)
        if worst > self.tol.eps_comm:
            p, q = pair or (0, 0)
            raise NotCommutingFamily(
                f"Members {p} and {q} do not commute (relative residual {worst:.3e})",
                {'pair': [p, q], 'residual': raw, 'relative_residual': worst},
            )

        cutoff = self.tol.eps_rank * max(1.0, float(top[0]))
        generators = []
        for m in stack:
            for h in ((m + dagger(m)) / 2.0, (m - dagger(m)) / 2.0j):
                if frobenius(h) > cutoff:
                    generators.append(h)
        self.logger.debug(f"Joint diagonalization: dim={dim}, generators={len(generators)}")

        u = np.eye(dim, dtype=np.complex128)
        if generators:
            rng = np.random.default_rng(seed)
            u = self._refine(u, np.asarray(generators), rng, depth=0, cap=len(stack))
        u = self._canonical_columns(u)

        for idx, m in enumerate(stack):
            rotated = dagger(u) @ m @ u
            off = frobenius(rotated - np.diag(np.diag(rotated)))
            if off > self.tol.eps_comm * (1.0 + norms[idx]):
                raise DiagonalizationFailure(
                    f"Member {idx} keeps off-diagonal residual {off:.3e}",
                    {'member': idx, 'residual': off},
                )
        return u

    def _refine(self, basis: np.ndarray, generators: np.ndarray, rng, depth: int, cap: int):
        rank = basis.shape[1]
        if rank == 1 or depth >= cap or self._is_scalar_block(basis, generators):
            return basis

        coeffs = rng.standard_normal(len(generators))
        combo = dagger(basis) @ np.tensordot(coeffs, generators, axes=1) @ basis
        try:
            w, w_vecs = scipy.linalg.eigh((combo + dagger(combo)) / 2.0)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise NumericalFailure(f"Eigensolver did not converge: {e}")

        rotated = basis @ w_vecs
        gap = self.tol.eps_rank * (1.0 + float(np.max(np.abs(w))))
        columns = []
        start = 0
        while start < rank:
            stop = start + 1
            while stop < rank and w[stop] - w[stop - 1] < gap:
                stop += 1
            block = rotated[:, start:stop]
            if stop - start > 1:
                block = self._refine(block, generators, rng, depth + 1, cap)
            columns.append(block)
            start = stop
        return np.hstack(columns)

    def _is_scalar_block(self, basis: np.ndarray, generators: np.ndarray) -> bool:
        compressed = dagger(basis) @ generators @ basis
        rank = basis.shape[1]
        traces = np.trace(compressed, axis1=1, axis2=2) / rank
        spread = compressed - traces[:, None, None] * np.eye(rank)
        return bool(np.max(np.linalg.norm(spread, axis=(1, 2))) <= self.tol.eps_rank)

    def _canonical_columns(self, u: np.ndarray) -> np.ndarray:
        u = _phase_normalize(u, self.tol.eps_rank)
        dominant = np.argmax(np.abs(u) > np.abs(u).max(axis=0) - 1e-12, axis=0)
        return u[:, np.argsort(dominant, kind='stable')]
