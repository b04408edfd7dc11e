"""Synthesis of a measure-and-prepare channel with a prescribed null space.

Given a self-adjoint subspace N of trace-zero operators, the effects of the
synthesized channel span the Hilbert-Schmidt complement of N, so a matrix
X is annihilated exactly when it lies in N.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from ..channels.evaluator import ChannelEvaluator
from ..config import Config
from ..errors import CertificationFailure, DimensionMismatch, NotSelfAdjoint, NotTraceZero
from ..linalg.spectral import SpectralSolver
from ..linalg.tensor import dagger, hermitian_basis, hermitian_to_real, matrix_unit
from ..models.reports import NullspaceReport
from ..models.schema import HolevoChannel, NullspaceChannel, SubspaceSpec, Tolerances


def _unit_rows(rows: np.ndarray, cutoff: float) -> np.ndarray:
    """Scale rows to unit norm, dropping numerically zero rows."""
    norms = np.linalg.norm(rows, axis=1)
    keep = norms > cutoff
    return rows[keep] / norms[keep, None]


class NullspaceSynthesizer:
    """
    Builds channels whose null space is a given self-adjoint trace-zero subspace.

    Pipeline:
    1. Hermitian basis {I, G_2, ..., G_m} of the complement of N
    2. Effects F_k = 2^-k (I + G_k / 2) for k >= 2 and F_1 = I - sum F_k
    3. Holevo channel with preparations e_k e_k* on C^m
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the synthesizer.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.solver = SpectralSolver(self.tol)
        self.evaluator = ChannelEvaluator(self.tol)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def _rank(self, rows: np.ndarray) -> int:
        if rows.size == 0:
            return 0
        singular = scipy.linalg.svdvals(rows)
        return int(np.sum(singular > self.tol.eps_rank * max(1.0, singular[0])))

    def subspace_dimension(self, spec: SubspaceSpec) -> int:
        """Complex dimension of the span of the generators."""
        if not spec.generators:
            return 0
        rows = np.array([g.reshape(-1) for g in spec.generators], dtype=np.complex128)
        return self._rank(_unit_rows(rows, self.tol.eps_rank))

    def check_subspace(self, spec: SubspaceSpec):
        """
        Check that every generator is trace-zero and the span is self-adjoint.

        Raises:
            NotTraceZero: With the offending generator index and trace
            NotSelfAdjoint: If adjoining adjoints increases the rank
        """
        for j, gen in enumerate(spec.generators):
            trace = complex(np.trace(gen))
            if abs(trace) > self.tol.eps_recon:
                raise NotTraceZero(
                    f"generators[{j}] has trace {trace:.3e}",
                    {'index': j, 'trace': abs(trace)},
                )
        if not spec.generators:
            return

        rows = np.array([g.reshape(-1) for g in spec.generators], dtype=np.complex128)
        adjoints = np.array([dagger(g).reshape(-1) for g in spec.generators])
        rank = self._rank(_unit_rows(rows, self.tol.eps_rank))
        closed = self._rank(_unit_rows(np.vstack([rows, adjoints]), self.tol.eps_rank))
        if closed > rank:
            raise NotSelfAdjoint(
                f"span of generators is not closed under adjoints (rank {rank} -> {closed})",
                {'rank': rank, 'rank_with_adjoints': closed},
            )

    def orthocomplement(self, spec: SubspaceSpec) -> List[np.ndarray]:
        """
        Hermitian basis of the complement of N, starting with the identity.

        Elements after the first are Hilbert-Schmidt orthogonal to I and to
        each other and have operator norm 1.

        Args:
            spec: Self-adjoint subspace of trace-zero operators

        Returns:
            [I, G_2, ..., G_m] with m = d^2 - dim N

        Raises:
            NotTraceZero: If some generator has nonzero trace
            NotSelfAdjoint: If the span is not closed under adjoints
        """
        self.check_subspace(spec)
        d = spec.dim
        basis = hermitian_basis(d)
        frame = np.array([hermitian_to_real(b) for b in basis])

        # Hermitian and anti-Hermitian parts of a self-adjoint span stay inside it
        parts = []
        for gen in spec.generators:
            parts.append((gen + dagger(gen)) / 2.0)
            parts.append((gen - dagger(gen)) / 2.0j)
        coords = np.array([frame @ hermitian_to_real(h) for h in parts]).reshape(-1, d * d)
        identity = frame @ hermitian_to_real(np.eye(d) / np.sqrt(d))
        constraints = np.vstack([identity, _unit_rows(coords, self.tol.eps_rank)])

        complement = scipy.linalg.null_space(constraints, rcond=self.tol.eps_rank)
        result = [np.eye(d, dtype=np.complex128)]
        stack = np.asarray(basis)
        for c in complement.T:
            g = np.einsum('a,aij->ij', c, stack)
            g = (g + dagger(g)) / 2.0
            result.append(g / scipy.linalg.norm(g, 2))

        self.logger.debug(f"Complement of a subspace in dimension {d}: m = {len(result)}")
        return result

    @staticmethod
    def _tilde(basis: List[np.ndarray]) -> List[np.ndarray]:
        identity = np.eye(basis[0].shape[0], dtype=np.complex128)
        return [identity + g / 2.0 for g in basis[1:]]

    def build_effects(self, basis: List[np.ndarray]) -> List[np.ndarray]:
        """
        Effects with geometric weights from a Hermitian basis {I, G_2, ..., G_m}.

        F~_k = I + G_k/2, F_k = 2^-k F~_k for k >= 2, F_1 = I - sum_{k>=2} F_k.

        Raises:
            CertificationFailure: If lambda_min(F_1) < 1/4 - eps_psd
        """
        identity = np.eye(basis[0].shape[0], dtype=np.complex128)
        tail = [f / 2.0 ** k for k, f in enumerate(self._tilde(basis), start=2)]
        first = identity - sum(tail, np.zeros_like(identity))
        effects = [first] + tail

        lam = self.solver.lambda_min(first)
        if lam < 0.25 - self.tol.eps_psd:
            self.logger.error(f"F_1 has lambda_min {lam:.3e} below 1/4")
            raise CertificationFailure(
                f"lambda_min(F_1) = {lam:.3e} is below 1/4",
                {'invariant': "F_1 lower bound", 'lambda_min': lam},
            )
        return effects

    def synthesize_channel(self, spec: SubspaceSpec) -> NullspaceChannel:
        """
        Holevo channel X -> sum_k Tr(F_k X) e_k e_k* whose null space is N.

        Args:
            spec: Self-adjoint subspace of trace-zero operators

        Returns:
            NullspaceChannel with dim_in = d and dim_out = m
        """
        basis = self.orthocomplement(spec)
        effects = self.build_effects(basis)
        m = len(effects)
        states = [matrix_unit(m, k, k) for k in range(m)]
        channel = HolevoChannel(dim_in=spec.dim, dim_out=m, states=states, effects=effects)
        lam = self.solver.lambda_min(effects[0])

        self.logger.info(
            f"Synthesized {spec.dim}->{m} channel for a subspace of dimension "
            f"{spec.dim ** 2 - m} (lambda_min(F_1) = {lam:.6f})"
        )
        return NullspaceChannel(
            channel=channel,
            effects_basis=basis,
            f_tilde=self._tilde(basis),
            lambda_min_f1=lam,
        )

    def effect_map_rank(self, channel: HolevoChannel) -> Tuple[int, np.ndarray]:
        """
        Numerical rank of X -> (Tr(F_k X))_k on the full operator space.

        Rows vec(F_k^T) are normalized first so geometric weights do not
        read as rank loss.

        Returns:
            (rank, singular values)
        """
        rows = np.array([f.T.reshape(-1) for f in channel.effects], dtype=np.complex128)
        rows = _unit_rows(rows, self.tol.eps_rank)
        if rows.size == 0:
            return 0, np.zeros(0)
        singular = scipy.linalg.svdvals(rows)
        return int(np.sum(singular > self.tol.eps_rank * singular[0])), singular

    def verify_nullspace(self, out: NullspaceChannel, spec: SubspaceSpec) -> NullspaceReport:
        """
        Check both inclusions between null(Phi) and N.

        Args:
            out: Synthesized channel
            spec: Subspace it should annihilate

        Returns:
            NullspaceReport with per-generator trace norms ||Phi(N_j)||_1

        Raises:
            DimensionMismatch: If the channel input dimension differs from spec.dim
        """
        channel = out.channel
        if channel.dim_in != spec.dim:
            raise DimensionMismatch(
                f"channel acts on dimension {channel.dim_in}, subspace on {spec.dim}",
                {'dim_in': channel.dim_in, 'dim': spec.dim},
            )

        residuals, annihilated = [], True
        for gen in spec.generators:
            image = self.evaluator.apply(channel, gen)
            residual = float(scipy.linalg.svdvals(image).sum())
            bound = self.tol.eps_recon * (1.0 + float(scipy.linalg.svdvals(gen).sum()))
            residuals.append(residual)
            annihilated = annihilated and residual <= bound

        rank, _ = self.effect_map_rank(channel)
        expected = spec.dim ** 2 - self.subspace_dimension(spec)
        ok = annihilated and rank == expected

        self.logger.info(
            f"Null space check: max generator residual "
            f"{max(residuals, default=0.0):.3e}, rank {rank} of expected {expected}, ok={ok}"
        )
        if not ok:
            self.logger.warning("Synthesized channel does not have the prescribed null space")
        return NullspaceReport(
            generator_residuals=residuals,
            rank_of_effect_map=rank,
            expected_rank=expected,
            ok=bool(ok),
        )
