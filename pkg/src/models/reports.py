"""Report models emitted by the analyses and the CLI."""

from typing import Any, Dict, List, Optional, Tuple

from pydantic import Field

from .schema import FrozenModel, Matrix, Tolerances


class NormReport(FrozenModel):
    """Norms and positivity of a single matrix."""

    frobenius: float
    trace_norm: float
    operator_norm: float
    lambda_min: Optional[float] = None
    is_hermitian: bool
    is_psd: bool


class CptpReport(FrozenModel):
    """Trace-preservation and complete-positivity residuals."""

    tp_residual: float
    cp_lambda_min: float
    ok: bool


class RangeCommutativityReport(FrozenModel):
    """
    Commutativity of the matrix-unit images M_ij = Phi(e_i e_j*).

    Attributes:
        commutes: worst_residual <= eps_comm
        worst_pair: 1-based matrix-unit labels ((i, j), (k, l)) of the worst pair
        worst_residual: ||[M_ij, M_kl]||_F / (1 + ||M_ij||_F ||M_kl||_F)
        worst_commutator_norm: ||[M_ij, M_kl]||_F of the worst pair, unnormalized
        adjoint_closure_residual: max ||M_ij* - M_ji||_F
    """

    commutes: bool
    worst_pair: Optional[Tuple[Tuple[int, int], Tuple[int, int]]] = None
    worst_residual: float
    worst_commutator_norm: float
    adjoint_closure_residual: float


class SeparableDecompositionReport(FrozenModel):
    sigma_residual: Optional[float] = None
    reconstruction_residual: float
    povm_residual: float
    psd_min: float
    ok: bool


class NullspaceReport(FrozenModel):
    generator_residuals: List[float]
    rank_of_effect_map: int
    expected_rank: int
    ok: bool


class DilationReport(FrozenModel):
    isometry_residual: float
    reconstruction_residual: float
    commutativity_residual: float
    stinespring_residual: float
    trace_residual: float
    ok: bool


class EigenStructureEntry(FrozenModel):
    """Rayleigh quotients of a projection on v_k and u_k."""

    index: int
    v_eigenvalue: float
    u_eigenvalue: float


class FixedPointReport(FrozenModel):
    fixed: bool
    residual: float
    commutes_with_all_kraus: bool
    max_commutator: float
    eigen_structure: List[EigenStructureEntry] = Field(default_factory=list)


class CommutantReport(FrozenModel):
    """Commutant of the Kraus family and its minimal projections."""

    basis: List[Matrix]
    projections: List[Matrix]
    pairwise_comm_residual: float
    dimension: int


class MultiplicativeDomainReport(FrozenModel):
    in_domain: bool
    worst_product_residual: float
    fix_of_dual_circ_phi: float
    v_eigen_ok: bool


class ValidationResult(FrozenModel):
    """
    Result of channel-file validation.

    Attributes:
        is_valid: Whether validation passed
        warnings: Non-critical issues
        errors: Critical failures, each prefixed with a JSON path
        residuals: Numeric residuals behind the verdict
    """

    is_valid: bool = Field(..., description="Overall validation status")
    warnings: List[str] = Field(default_factory=list, description="Non-critical issues")
    errors: List[str] = Field(default_factory=list, description="Critical validation errors")
    residuals: Dict[str, float] = Field(default_factory=dict)


class Report(FrozenModel):
    """
    Top-level CLI report.

    ``runtime_ms`` is kept out of the canonical JSON rendering.
    """

    command: str
    inputs: Dict[str, str] = Field(default_factory=dict)
    tolerances: Tolerances
    payload: Dict[str, Any] = Field(default_factory=dict)
    ok: bool
    runtime_ms: int = 0
    error: Optional[Dict[str, Any]] = None
