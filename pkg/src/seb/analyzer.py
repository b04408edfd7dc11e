"""Commutative-range test and measure-and-prepare decomposition.

A channel whose matrix-unit images pairwise commute is jointly
diagonalized; the diagonals of the rotated images give the POVM effects,
and the columns of the diagonalizing unitary give the prepared pure
states. Every decomposition is certified before it is returned.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..channels.converter import ChannelConverter
from ..channels.evaluator import ChannelEvaluator
from ..config import Config
from ..errors import (
    CertificationFailure,
    DiagonalizationFailure,
    DimensionMismatch,
    NotCommutativeRange,
    NotCommutingFamily,
)
from ..linalg.spectral import SpectralSolver
from ..linalg.tensor import dagger, frobenius, relative_commutator_residual, tensor_product
from ..models.reports import RangeCommutativityReport, SeparableDecompositionReport
from ..models.schema import Channel, RankOneKraus, SebDecomposition, SebTerm, Tolerances


class SebAnalyzer:
    """
    Decides commutativity of a channel's range and decomposes such channels.

    Steps of decompose_seb:
    1. Matrix-unit images M_ij = Phi(e_i e_j*)
    2. Joint diagonalizer U of the family
    3. Effects from the diagonals of U* M_ij U
    4. Term weights p_k and states rho_k of the weighted Choi state
    5. Preparations R_k = v_k v_k* from the columns of U
    6. Certification
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

    def range_commutativity_test(self, ch: Channel) -> RangeCommutativityReport:
        """
        Scan all pairs of matrix-unit images for the worst relative commutator.

        Args:
            ch: Channel (expected to pass verify_cptp)

        Returns:
            RangeCommutativityReport with 1-based witness labels
        """
        d, d_out = ch.dim_in, ch.dim_out
        images = self.evaluator.matrix_unit_images(ch)
        worst, worst_raw, where = relative_commutator_residual(images.reshape(d * d, d_out, d_out))

        adjoint_gap = dagger(images) - images.transpose(1, 0, 2, 3)
        closure = float(np.linalg.norm(adjoint_gap, axis=(2, 3)).max())

        worst_pair = None
        if where is not None:
            worst_pair = tuple((idx // d + 1, idx % d + 1) for idx in where)

        commutes = worst <= self.tol.eps_comm
        self.logger.info(
            f"Range commutativity: commutes={commutes}, worst_residual={worst:.3e}, "
            f"witness={worst_pair}, adjoint_closure={closure:.3e}"
        )
        return RangeCommutativityReport(
            commutes=bool(commutes),
            worst_pair=worst_pair,
            worst_residual=worst,
            worst_commutator_norm=worst_raw,
            adjoint_closure_residual=closure,
        )

    def decompose_seb(
        self,
        ch: Channel,
        weights: Optional[Sequence[float]] = None,
        seed: int = Config.DEFAULT_SEED,
    ) -> SebDecomposition:
        """
        Measure-and-prepare decomposition of a commutative-range channel.

        Args:
            ch: CPTP channel with commutative range
            weights: Choi weights (default: uniform)
            seed: Seed for the joint diagonalization

        Returns:
            Certified SebDecomposition

        Raises:
            NotCommutativeRange: If the range test fails
            CertificationFailure: If any invariant of the result is violated
        """
        report = self.range_commutativity_test(ch)
        if not report.commutes:
            raise NotCommutativeRange(
                f"Range is not commutative (residual {report.worst_residual:.3e})",
                {'worst_pair': report.worst_pair, 'worst_residual': report.worst_residual},
            )

        w = self.evaluator.validated_weights(weights, ch.dim_in)
        images = self.evaluator.matrix_unit_images(ch)
        family = list(images.reshape(ch.dim_in ** 2, ch.dim_out, ch.dim_out))
        try:
            u = self.solver.simultaneous_diagonalize(family, seed)
        except (NotCommutingFamily, DiagonalizationFailure) as e:
            residual = float(e.details.get('residual', float('nan')))
            self.logger.error(f"Certification failed: joint diagonalization ({e.message})")
            raise CertificationFailure(
                f"Decomposition violates joint diagonalization: {e.message}",
                {**e.details, 'invariant': "joint diagonalization", 'residual': residual},
            ) from e

        # diagonals[i, j, k] = (U* M_ij U)_kk
        diagonals = np.einsum('ijkk->ijk', dagger(u) @ images @ u)
        roots = np.sqrt(np.outer(w, w))

        effects, preparations, terms = [], [], []
        dropped = 0.0
        for k in range(ch.dim_out):
            block = diagonals[:, :, k]
            effect = block.T
            effects.append((effect + dagger(effect)) / 2.0)
            v = u[:, k]
            preparations.append(np.outer(v, v.conj()))

            weighted = roots * block
            p = float(np.trace(weighted).real)
            if p > self.tol.eps_rank:
                rho = weighted / p
                terms.append(SebTerm(
                    index=k + 1, probability=p, state=(rho + dagger(rho)) / 2.0, vector=v
                ))
            else:
                dropped += max(p, 0.0)

        dec = SebDecomposition(
            dim_in=ch.dim_in,
            dim_out=ch.dim_out,
            unitary=u,
            weights=w,
            terms=terms,
            effects=effects,
            preparations=preparations,
            dropped_mass=dropped,
        )
        self._certify(dec, ch)
        self.logger.info(
            f"Decomposed {ch.dim_in}->{ch.dim_out} channel into {len(terms)} terms "
            f"(dropped mass {dropped:.3e})"
        )
        return dec

    def rank_one_kraus(self, dec: SebDecomposition) -> RankOneKraus:
        """Rank-one Kraus form of the certified Holevo channel (R_k, F_k)."""
        return self.converter.to_rank_one_kraus(dec.to_holevo())

    def _certify(self, dec: SebDecomposition, ch: Channel):
        def fail(invariant: str, residual: float):
            self.logger.error(f"Certification failed: {invariant} (residual {residual:.3e})")
            raise CertificationFailure(
                f"Decomposition violates {invariant} (residual {residual:.3e})",
                {'invariant': invariant, 'residual': residual},
            )

        unitarity = frobenius(dagger(dec.unitary) @ dec.unitary - np.eye(dec.dim_out))
        if unitarity > self.tol.eps_herm:
            fail("orthonormal preparation vectors", unitarity)

        mass = abs(sum(t.probability for t in dec.terms) + dec.dropped_mass - 1.0)
        if mass > self.tol.eps_recon:
            fail("total probability", mass)

        for term in dec.terms:
            trace_gap = abs(np.trace(term.state).real - 1.0)
            if trace_gap > self.tol.eps_recon:
                fail(f"unit trace of rho_{term.index}", trace_gap)
            lam = self.solver.lambda_min(term.state)
            if lam < -self.tol.eps_psd:
                fail(f"positivity of rho_{term.index}", -lam)

        include_sigma = max(dec.dim_in, dec.dim_out) <= Config.CHOI_CERTIFY_MAX_DIM
        check = self.verify_separable_decomposition(dec, ch, include_sigma=include_sigma)
        if check.povm_residual > self.tol.eps_recon:
            fail("effects sum to identity", check.povm_residual)
        if check.psd_min < -self.tol.eps_psd:
            fail("positivity of effects", -check.psd_min)
        if check.sigma_residual is not None and check.sigma_residual > self.tol.eps_recon:
            fail("separable form of sigma", check.sigma_residual)
        if check.reconstruction_residual > self.tol.eps_recon:
            fail("channel reconstruction", check.reconstruction_residual)

    def verify_separable_decomposition(
        self,
        dec: SebDecomposition,
        ch: Channel,
        include_sigma: bool = True,
    ) -> SeparableDecompositionReport:
        """
        Recompute every residual of a decomposition against its channel.

        Args:
            dec: Decomposition to check
            ch: Channel it claims to represent
            include_sigma: Materialize the weighted Choi state

        Raises:
            DimensionMismatch: If dimensions disagree
        """
        if (dec.dim_in, dec.dim_out) != (ch.dim_in, ch.dim_out):
            raise DimensionMismatch(
                f"decomposition is {dec.dim_in}->{dec.dim_out}, channel is {ch.dim_in}->{ch.dim_out}"
            )

        sigma_residual = None
        if include_sigma:
            sigma = self.evaluator.weighted_choi(ch, dec.weights).sigma
            separable = np.zeros_like(sigma)
            for term in dec.terms:
                projector = np.outer(term.vector, term.vector.conj())
                separable += term.probability * tensor_product(term.state, projector)
            sigma_residual = frobenius(sigma - separable)

        effects = np.asarray(dec.effects)
        holevo_images = np.einsum('kji,kab->ijab', effects, np.asarray(dec.preparations))
        gap = self.evaluator.matrix_unit_images(ch) - holevo_images
        reconstruction = float(np.linalg.norm(gap, axis=(2, 3)).max())

        povm = frobenius(effects.sum(axis=0) - np.eye(dec.dim_in))
        psd_min = min(self.solver.lambda_min(f) for f in dec.effects)

        ok = (
            (sigma_residual is None or sigma_residual <= self.tol.eps_recon)
            and reconstruction <= self.tol.eps_recon
            and povm <= self.tol.eps_recon
            and psd_min >= -self.tol.eps_psd
        )
        if not ok:
            self.logger.warning(
                f"Decomposition check failed: sigma={sigma_residual}, "
                f"reconstruction={reconstruction:.3e}, povm={povm:.3e}, psd_min={psd_min:.3e}"
            )
        return SeparableDecompositionReport(
            sigma_residual=sigma_residual,
            reconstruction_residual=reconstruction,
            povm_residual=povm,
            psd_min=psd_min,
            ok=bool(ok),
        )
