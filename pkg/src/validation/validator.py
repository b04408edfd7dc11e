"""Channel validation utilities.

This module validates parsed channels for trace preservation, complete
positivity and well-formed Holevo pairs, and subspace files for trace-zero
self-adjoint generators. Every error message starts with the JSON path of
the offending field.
"""

import logging
from typing import List, Optional

import numpy as np

from ..channels.evaluator import ChannelEvaluator
from ..config import Config
from ..errors import NotSelfAdjoint, NotTraceZero
from ..linalg.spectral import SpectralSolver
from ..models.reports import ValidationResult
from ..models.schema import Channel, HolevoChannel, KrausChannel, SubspaceSpec, Tolerances
from ..synthesis.nullspace import NullspaceSynthesizer


class ChannelFileValidator:
    """
    Validates parsed channels.

    Performs:
    - Trace-preservation check on the representation's own data
    - Complete-positivity check on the weighted Choi state
    - Per-pair positivity and normalization of Holevo states and effects
    - Redundancy warnings (more terms than d * d')
    - Trace-zero and adjoint-closure checks of subspace generators
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the validator.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.evaluator = ChannelEvaluator(self.tol)
        self.solver = SpectralSolver(self.tol)
        self.synthesizer = NullspaceSynthesizer(self.tol)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def validate_subspace(self, spec: SubspaceSpec) -> ValidationResult:
        """
        Validate a parsed subspace file.

        Generators must be trace-zero and their span closed under adjoints.

        Args:
            spec: Parsed subspace

        Returns:
            ValidationResult whose error names generators[j] or generators
        """
        errors: List[str] = []
        try:
            self.synthesizer.check_subspace(spec)
        except NotTraceZero as e:
            errors.append(f"generators[{e.details['index']}]: not trace-zero "
                          f"(|trace| {e.details['trace']:.3e})")
        except NotSelfAdjoint as e:
            errors.append(f"generators: span is not closed under adjoints "
                          f"(rank {e.details['rank']} -> {e.details['rank_with_adjoints']})")

        for error in errors:
            self.logger.error(f"Validation error: {error}")
        return ValidationResult(is_valid=not errors, errors=errors)

    def validate(self, ch: Channel) -> ValidationResult:
        """
        Validate a parsed channel.

        Args:
            ch: Channel in any representation

        Returns:
            ValidationResult with path-prefixed errors and the CPTP residuals
        """
        self.logger.debug(f"Validating {ch.representation} channel {ch.dim_in}->{ch.dim_out}")

        warnings: List[str] = []
        errors: List[str] = []

        if isinstance(ch, HolevoChannel):
            errors.extend(self._holevo_pair_errors(ch))
            count = len(ch.effects)
        elif isinstance(ch, KrausChannel):
            count = len(ch.kraus)
        else:
            count = 0

        if count > ch.dim_in * ch.dim_out:
            warnings.append(
                f"{ch.representation}: {count} terms exceed d*d' = {ch.dim_in * ch.dim_out}"
            )

        report = self.evaluator.verify_cptp(ch)
        if report.tp_residual > self.tol.eps_recon:
            errors.append(f"{self._tp_path(ch)}: not trace preserving "
                          f"(residual {report.tp_residual:.3e})")
        if report.cp_lambda_min < -self.tol.eps_psd:
            path = "choi.sigma" if ch.representation == "choi" else ch.representation
            errors.append(f"{path}: not completely positive "
                          f"(lambda_min {report.cp_lambda_min:.3e})")

        result = ValidationResult(
            is_valid=not errors,
            warnings=warnings,
            errors=errors,
            residuals={'tp_residual': report.tp_residual, 'cp_lambda_min': report.cp_lambda_min},
        )

        self.logger.info(
            f"Validation complete: valid={result.is_valid}, "
            f"warnings={len(warnings)}, errors={len(errors)}"
        )
        for warning in warnings:
            self.logger.warning(f"Validation warning: {warning}")
        for error in errors:
            self.logger.error(f"Validation error: {error}")

        return result

    @staticmethod
    def _tp_path(ch: Channel) -> str:
        return {'kraus': "kraus", 'holevo': "holevo.effects", 'choi': "choi.sigma"}[ch.representation]

    def _holevo_pair_errors(self, ch: HolevoChannel) -> List[str]:
        errors = []
        for k, (state, effect) in enumerate(ch.pairs):
            trace = complex(np.trace(state))
            if abs(trace - 1.0) > self.tol.eps_recon:
                errors.append(f"holevo.states[{k}]: trace {trace.real:.6g} is not 1")
            if not self.solver.norms_and_psd_check(state).is_psd:
                errors.append(f"holevo.states[{k}]: not Hermitian PSD")
            if not self.solver.norms_and_psd_check(effect).is_psd:
                errors.append(f"holevo.effects[{k}]: not Hermitian PSD")
        return errors
