"""Dilation of a measure-and-prepare channel to a commutative-range map.

E is the direct sum of m copies of the input space. The isometry
U: C^d -> E stacks the blocks sqrt(F_k), the *-homomorphism pi sends a
tuple a to the block-diagonal sum of a_k I_d, and the channel factors as
Phi(X) = Psi_*(U X U*) with Psi = pi o gamma.
"""

import logging
from typing import Optional

import numpy as np

from ..channels.evaluator import ChannelEvaluator
from ..config import Config
from ..errors import DimensionMismatch, NotHermitian, NotPSD, NotPSDInput
from ..linalg.spectral import SpectralSolver
from ..linalg.tensor import (
    check_shape,
    dagger,
    frobenius,
    hermitian_basis,
    pairwise_commutator_residual,
)
from ..models.reports import DilationReport
from ..models.schema import DilationResult, HolevoChannel, Tolerances


class CommutativeDilator:
    """
    Builds and checks the dilation U, pi, gamma, Psi of a Holevo channel.

    Maps:
    - gamma(Y) = (Tr(Y R_k))_k
    - pi(a) = sum_k a_k I_d on block k
    - eta(a) = U* pi(a) U = sum_k a_k F_k
    - Psi = pi o gamma and its predual Psi_*(Z) = sum_k Tr(Z_kk) R_k
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the dilator.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.solver = SpectralSolver(self.tol)
        self.evaluator = ChannelEvaluator(self.tol)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def build_dilation(self, ch: HolevoChannel) -> DilationResult:
        """
        Stack the square roots of the effects into an isometry.

        Args:
            ch: Holevo channel with sum_k F_k = I

        Returns:
            DilationResult on E of dimension d*m

        Raises:
            NotPSDInput: If some effect is not Hermitian PSD
        """
        blocks = []
        for k, effect in enumerate(ch.effects):
            try:
                blocks.append(self.solver.psd_sqrt(effect))
            except (NotPSD, NotHermitian) as e:
                path = f"holevo.effects[{k}]"
                raise NotPSDInput(f"{path}: {e.message}", {'path': path, **e.details})

        isometry = np.vstack(blocks)
        m = len(blocks)
        residual = frobenius(dagger(isometry) @ isometry - np.eye(ch.dim_in))
        if residual > self.tol.eps_recon:
            self.logger.warning(f"Dilation is not isometric (residual {residual:.3e})")
        self.logger.info(
            f"Built dilation of a {ch.dim_in}->{ch.dim_out} channel: "
            f"{m} blocks, dimension {ch.dim_in * m}"
        )
        return DilationResult(
            dim_in=ch.dim_in,
            dim_out=ch.dim_out,
            isometry=isometry,
            block_count=m,
            preparations=list(ch.states),
            dilation_dim=ch.dim_in * m,
        )

    def gamma_apply(self, dil: DilationResult, y) -> np.ndarray:
        """Outcome tuple (Tr(y R_k))_k of a dim_out x dim_out operator."""
        y = check_shape(y, (dil.dim_out, dil.dim_out), "y")
        return np.einsum('ij,kji->k', y, np.asarray(dil.preparations))

    def pi_apply(self, dil: DilationResult, a) -> np.ndarray:
        """Block-diagonal operator sum_k a_k I_d on E."""
        a = np.asarray(a, dtype=np.complex128)
        if a.shape != (dil.block_count,):
            raise DimensionMismatch(
                f"expected {dil.block_count} coefficients, got shape {a.shape}",
                {'shape': list(a.shape)},
            )
        return np.kron(np.diag(a), np.eye(dil.dim_in))

    def eta_apply(self, dil: DilationResult, a) -> np.ndarray:
        """U* pi(a) U, which equals sum_k a_k F_k."""
        u = dil.isometry
        return dagger(u) @ self.pi_apply(dil, a) @ u

    def psi_apply(self, dil: DilationResult, y) -> np.ndarray:
        """
        Commutative-range map Psi(y) = pi(gamma(y)).

        Raises:
            DimensionMismatch: If y is not dim_out x dim_out
        """
        return self.pi_apply(dil, self.gamma_apply(dil, y))

    def predual_apply(self, dil: DilationResult, z) -> np.ndarray:
        """
        Predual Psi_*(z) = sum_k Tr(z_kk) R_k over the diagonal d x d blocks of z.

        Raises:
            DimensionMismatch: If z is not (d*m) x (d*m)
        """
        size = dil.dilation_dim
        z = check_shape(z, (size, size), "z")
        blocks = z.reshape(dil.block_count, dil.dim_in, dil.block_count, dil.dim_in)
        traces = np.einsum('kiki->k', blocks)
        return np.einsum('k,kab->ab', traces, np.asarray(dil.preparations))

    def verify_dilation(self, dil: DilationResult, ch: HolevoChannel) -> DilationReport:
        """
        Check isometry, reconstruction, commutative range and Stinespring form.

        Args:
            dil: Dilation to check
            ch: Channel it should reproduce

        Raises:
            DimensionMismatch: If dimensions or the number of pairs disagree
        """
        if (dil.dim_in, dil.dim_out, dil.block_count) != (ch.dim_in, ch.dim_out, len(ch.effects)):
            raise DimensionMismatch(
                f"dilation is {dil.dim_in}->{dil.dim_out} with {dil.block_count} blocks, "
                f"channel is {ch.dim_in}->{ch.dim_out} with {len(ch.effects)} pairs"
            )

        u = dil.isometry
        d = dil.dim_in
        isometry = frobenius(dagger(u) @ u - np.eye(d))

        images = self.evaluator.matrix_unit_images(ch)
        reconstruction, trace_gap = 0.0, 0.0
        for i in range(d):
            for j in range(d):
                out = self.predual_apply(dil, np.outer(u[:, i], u[:, j].conj()))
                reconstruction = max(reconstruction, frobenius(out - images[i, j]))
                trace_gap = max(trace_gap, abs(np.trace(out) - float(i == j)))

        outputs = [self.psi_apply(dil, b) for b in hermitian_basis(dil.dim_out)]
        commutativity, _ = pairwise_commutator_residual(outputs)

        stinespring = 0.0
        for k, effect in enumerate(ch.effects):
            unit = np.zeros(dil.block_count)
            unit[k] = 1.0
            stinespring = max(stinespring, frobenius(self.eta_apply(dil, unit) - effect))

        ok = (
            isometry <= self.tol.eps_recon
            and reconstruction <= self.tol.eps_recon
            and commutativity <= self.tol.eps_comm
            and stinespring <= self.tol.eps_recon
            and trace_gap <= self.tol.eps_recon
        )
        self.logger.info(
            f"Dilation check: isometry={isometry:.3e}, reconstruction={reconstruction:.3e}, "
            f"commutativity={commutativity:.3e}, stinespring={stinespring:.3e}, ok={ok}"
        )
        if not ok:
            self.logger.warning("Dilation does not reproduce the channel")
        return DilationReport(
            isometry_residual=isometry,
            reconstruction_residual=reconstruction,
            commutativity_residual=commutativity,
            stinespring_residual=stinespring,
            trace_residual=float(trace_gap),
            ok=bool(ok),
        )
