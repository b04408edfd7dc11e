"""Fixed points and multiplicative domain of rank-one Kraus channels.

For Phi(X) = sum_k E_k X E_k* with E_k = u_k v_k*, the commutant of the
Kraus family is a commutative algebra of fixed points of the dual map,
and a projection is fixed by the dual map exactly when it commutes with
every E_k.
"""

import logging
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from ..channels.converter import ChannelConverter
from ..channels.evaluator import ChannelEvaluator
from ..config import Config
from ..errors import CertificationFailure, DimensionMismatch, NotProjection
from ..linalg.spectral import SpectralSolver
from ..linalg.tensor import (
    check_shape,
    dagger,
    frobenius,
    matrix_unit,
    pairwise_commutator_residual,
    projection_residuals,
)
from ..models.reports import (
    CommutantReport,
    EigenStructureEntry,
    FixedPointReport,
    MultiplicativeDomainReport,
)
from ..models.schema import Channel, RankOneKraus, Tolerances


class StructureAnalyzer:
    """
    Structure of the dual map of a rank-one Kraus channel.

    Handles:
    - Fixed-point test for a single projection
    - Commutant of {E_k, E_k*} and its minimal projections
    - Multiplicative-domain test for a projection
    - Full fixed-point space of the dual map
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the analyzer.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.solver = SpectralSolver(self.tol)
        self.evaluator = ChannelEvaluator(self.tol)
        self.converter = ChannelConverter(self.tol)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def rank_one_form(self, ch: Channel) -> RankOneKraus:
        """
        Rank-one Kraus form E_k = u_k v_k* with unit u_k.

        Raises:
            NotRankOne: If the channel has no rank-one Kraus presentation
            CertificationFailure: If sum_k v_k v_k* differs from I
        """
        form = self.converter.to_rank_one_kraus(ch)
        v = np.asarray(form.v_vectors)
        residual = frobenius(v.T @ v.conj() - np.eye(form.dim_in))
        if residual > self.tol.eps_recon:
            raise CertificationFailure(
                f"sum of v_k v_k* differs from I (residual {residual:.3e})",
                {'invariant': "sum of v_k v_k* is identity", 'residual': residual},
            )
        return form

    @staticmethod
    def _require_square(ch: RankOneKraus):
        if ch.dim_in != ch.dim_out:
            raise DimensionMismatch(
                f"structure analysis needs dim_in == dim_out, got {ch.dim_in}->{ch.dim_out}",
                {'dim_in': ch.dim_in, 'dim_out': ch.dim_out},
            )

    def _check_projection(self, p, dim: int) -> np.ndarray:
        p = check_shape(p, (dim, dim), "projection")
        herm, idem = projection_residuals(p)
        if herm > self.tol.eps_herm or idem > self.tol.eps_recon:
            raise NotProjection(
                f"not an orthogonal projection (||P-P*|| = {herm:.3e}, ||P^2-P|| = {idem:.3e})",
                {'hermitian_residual': herm, 'idempotent_residual': idem},
            )
        return (p + dagger(p)) / 2.0

    @staticmethod
    def _apply(ch: RankOneKraus, x: np.ndarray) -> np.ndarray:
        u, v = np.asarray(ch.u_vectors), np.asarray(ch.v_vectors)
        weights = np.einsum('ki,ij,kj->k', v.conj(), x, v)
        return np.einsum('k,ka,kb->ab', weights, u, u.conj())

    @staticmethod
    def _dual_apply(ch: RankOneKraus, y: np.ndarray) -> np.ndarray:
        u, v = np.asarray(ch.u_vectors), np.asarray(ch.v_vectors)
        weights = np.einsum('ka,ab,kb->k', u.conj(), y, u)
        return np.einsum('k,ki,kj->ij', weights, v, v.conj())

    def adjoint_fixed_check(self, ch: RankOneKraus, p) -> FixedPointReport:
        """
        Test whether a projection is fixed by the dual map.

        Args:
            ch: Rank-one Kraus channel with dim_in == dim_out
            p: Orthogonal projection

        Returns:
            FixedPointReport; eigen_structure is filled when p is fixed

        Raises:
            NotProjection: If p is not Hermitian idempotent
        """
        self._require_square(ch)
        p = self._check_projection(p, ch.dim_in)

        residual = frobenius(self._dual_apply(ch, p) - p)
        commutators = [frobenius(p @ e - e @ p) for e in ch.kraus_operators]
        max_comm = max(commutators)
        fixed = residual <= self.tol.eps_recon

        entries = []
        if fixed:
            for k, (u, v) in enumerate(zip(ch.u_vectors, ch.v_vectors)):
                entries.append(EigenStructureEntry(
                    index=k + 1,
                    v_eigenvalue=float((v.conj() @ p @ v).real / (v.conj() @ v).real),
                    u_eigenvalue=float((u.conj() @ p @ u).real),
                ))

        self.logger.debug(f"Fixed-point check: residual={residual:.3e}, max_commutator={max_comm:.3e}")
        return FixedPointReport(
            fixed=bool(fixed),
            residual=residual,
            commutes_with_all_kraus=bool(max_comm <= self.tol.eps_comm),
            max_commutator=max_comm,
            eigen_structure=entries,
        )

    def commutant_basis(self, ch: RankOneKraus) -> List[np.ndarray]:
        """Basis of {A : [A, E_k] = [A, E_k*] = 0 for all k}."""
        d = ch.dim_in
        identity = np.eye(d)
        blocks = []
        for e in ch.kraus_operators:
            for op in (e, dagger(e)):
                # row-major vec(A E - E A) = (I (x) E^T - E (x) I) vec(A)
                blocks.append(np.kron(identity, op.T) - np.kron(op, identity))
        null = scipy.linalg.null_space(np.vstack(blocks), rcond=self.tol.eps_rank)
        return [col.reshape(d, d) for col in null.T]

    def _spectral_projections(self, h: np.ndarray, frame: np.ndarray) -> List[np.ndarray]:
        """Spectral projections of the compression of h to the columns of frame."""
        dec = self.solver.eigh(dagger(frame) @ h @ frame)
        w, vecs = dec.eigenvalues, frame @ dec.eigenvectors
        gap = self.tol.eps_comm * (1.0 + frobenius(h))
        groups, start = [], 0
        for stop in range(1, len(w) + 1):
            if stop == len(w) or w[stop - 1] - w[stop] > gap:
                cols = vecs[:, start:stop]
                groups.append(cols @ dagger(cols))
                start = stop
        return groups

    def _random_hermitian(self, basis: Sequence[np.ndarray], rng) -> np.ndarray:
        h = np.zeros_like(basis[0])
        for b in basis:
            r, s = rng.standard_normal(2)
            h = h + r * (b + dagger(b)) / 2.0 + s * (b - dagger(b)) / 2.0j
        return (h + dagger(h)) / 2.0

    def commutant_projections(
        self,
        ch: RankOneKraus,
        seed: int = Config.DEFAULT_SEED,
    ) -> CommutantReport:
        """
        Commutant of the Kraus family and a maximal commuting set of its projections.

        Projections come from the spectrum of a seeded random Hermitian
        element; a projection of rank > 1 is split further by later random
        elements that commute with it, for at most dim(A) rounds.

        Args:
            ch: Rank-one Kraus channel with dim_in == dim_out
            seed: Seed for the random commutant elements

        Raises:
            CertificationFailure: If the projections do not pairwise commute
        """
        self._require_square(ch)
        d = ch.dim_in
        basis = self.commutant_basis(ch)
        rng = np.random.default_rng(seed)

        h = self._random_hermitian(basis, rng)
        projections = self._spectral_projections(h, np.eye(d, dtype=np.complex128))
        for _ in range(len(basis)):
            if all(np.trace(p).real < 1.5 for p in projections):
                break
            h = self._random_hermitian(basis, rng)
            scale = 1.0 + frobenius(h)
            refined = []
            for p in projections:
                if np.trace(p).real > 1.5 and frobenius(h @ p - p @ h) <= self.tol.eps_comm * scale:
                    frame = self.solver.eigh(p).eigenvectors[:, :int(round(np.trace(p).real))]
                    refined.extend(self._spectral_projections(h, frame))
                else:
                    refined.append(p)
            if len(refined) == len(projections):
                break
            projections = refined

        projections.sort(key=self._projection_key)
        residual, _ = pairwise_commutator_residual(projections)
        if residual > self.tol.eps_comm:
            self.logger.error(f"Commutant projections do not commute (residual {residual:.3e})")
            raise CertificationFailure(
                f"commutant projections do not pairwise commute (residual {residual:.3e})",
                {'invariant': "pairwise commuting projections", 'residual': residual},
            )

        self.logger.info(
            f"Commutant of dimension {len(basis)} with {len(projections)} minimal projections"
        )
        return CommutantReport(
            basis=basis,
            projections=projections,
            pairwise_comm_residual=residual,
            dimension=len(basis),
        )

    def _projection_key(self, p: np.ndarray):
        diagonal = np.diag(p).real
        lead = int(np.flatnonzero(diagonal > self.tol.eps_recon)[0])
        return (lead, -diagonal[lead])

    def multiplicative_projection_check(self, ch: RankOneKraus, p) -> MultiplicativeDomainReport:
        """
        Test whether a projection lies in the multiplicative domain.

        Membership is checked on all matrix units, which is exact by linearity.

        Raises:
            NotProjection: If p is not Hermitian idempotent
        """
        self._require_square(ch)
        d = ch.dim_in
        p = self._check_projection(p, d)
        image = self._apply(ch, p)

        worst = 0.0
        for i in range(d):
            for j in range(d):
                b = matrix_unit(d, i, j)
                phi_b = self._apply(ch, b)
                worst = max(
                    worst,
                    frobenius(self._apply(ch, p @ b) - image @ phi_b),
                    frobenius(self._apply(ch, b @ p) - phi_b @ image),
                )

        in_domain = worst <= self.tol.eps_recon * (1.0 + frobenius(p))
        fix_gap = frobenius(self._dual_apply(ch, image) - p)

        v_eigen_ok = True
        for v in ch.v_vectors:
            norm_sq = (v.conj() @ v).real
            q = (v.conj() @ p @ v) / norm_sq
            v_eigen_ok = v_eigen_ok and frobenius(p @ v - q * v) / np.sqrt(norm_sq) <= self.tol.eps_recon

        self.logger.debug(
            f"Multiplicative domain check: worst={worst:.3e}, fix_gap={fix_gap:.3e}, "
            f"v_eigen_ok={v_eigen_ok}"
        )
        return MultiplicativeDomainReport(
            in_domain=bool(in_domain),
            worst_product_residual=worst,
            fix_of_dual_circ_phi=fix_gap,
            v_eigen_ok=bool(v_eigen_ok),
        )

    def fixed_point_space(self, ch: Union[Channel, RankOneKraus]) -> List[np.ndarray]:
        """
        Basis of Fix(Phi*), the eigenvalue-1 space of the dual superoperator.

        Raises:
            DimensionMismatch: If dim_in != dim_out
        """
        if isinstance(ch, RankOneKraus):
            ch = ch.to_kraus()
        if ch.dim_in != ch.dim_out:
            raise DimensionMismatch(
                f"fixed points need dim_in == dim_out, got {ch.dim_in}->{ch.dim_out}",
                {'dim_in': ch.dim_in, 'dim_out': ch.dim_out},
            )
        dual = self.evaluator.dual_superoperator(ch)
        null = scipy.linalg.null_space(dual - np.eye(dual.shape[0]), rcond=self.tol.eps_rank)
        return [col.reshape(ch.dim_in, ch.dim_in) for col in null.T]

    def projection_family_commutativity(self, projections: Sequence[np.ndarray]) -> float:
        """Largest ||[P, Q]||_F over pairs of projections."""
        residual, _ = pairwise_commutator_residual(list(projections))
        return residual
