"""Pydantic models for channel data.

This module defines the structured data models shared by every analysis:
tolerances, the three channel representations, and the certified outputs
of decomposition, synthesis and dilation. Matrix fields hold read-only
``complex128`` arrays so values are immutable after construction.
"""

from typing import Annotated, List, Literal, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from ..config import Config


def _frozen(arr: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite (no NaN/Inf)")
    arr.setflags(write=False)
    return arr


def _as_matrix(value) -> np.ndarray:
    arr = np.array(value, dtype=np.complex128, copy=True)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    return _frozen(arr)


def _as_vector(value) -> np.ndarray:
    arr = np.array(value, dtype=np.complex128, copy=True)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a non-empty vector, got shape {arr.shape}")
    return _frozen(arr)


def _as_real_vector(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D real sequence, got shape {arr.shape}")
    return _frozen(arr)


Matrix = Annotated[np.ndarray, BeforeValidator(_as_matrix)]
Vector = Annotated[np.ndarray, BeforeValidator(_as_vector)]
RealVector = Annotated[np.ndarray, BeforeValidator(_as_real_vector)]


class FrozenModel(BaseModel):
    """Base for immutable models carrying numpy arrays."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Tolerances(FrozenModel):
    """
    Numerical tolerances used by every check.

    Attributes:
        eps_herm: Hermiticity residual bound
        eps_psd: Allowed negative-eigenvalue magnitude
        eps_comm: Relative commutator Frobenius bound
        eps_recon: Reconstruction bound
        eps_rank: Singular-value cutoff for rank decisions
    """

    eps_herm: float = Field(Config.EPS_HERM, gt=0.0, lt=1.0)
    eps_psd: float = Field(Config.EPS_PSD, gt=0.0, lt=1.0)
    eps_comm: float = Field(Config.EPS_COMM, gt=0.0, lt=1.0)
    eps_recon: float = Field(Config.EPS_RECON, gt=0.0, lt=1.0)
    eps_rank: float = Field(Config.EPS_RANK, gt=0.0, lt=1.0)


class EigDecomposition(FrozenModel):
    """Eigenvalues (descending) and unitary eigenvector columns."""

    eigenvalues: RealVector
    eigenvectors: Matrix


class _ChannelBase(FrozenModel):
    dim_in: int = Field(..., gt=0, description="Input dimension d")
    dim_out: int = Field(..., gt=0, description="Output dimension d'")


def _check_terms(count: int, what: str):
    if count == 0:
        raise ValueError(f"{what} must be non-empty")
    if count > Config.MAX_TERMS:
        raise ValueError(f"{what} has {count} terms, cap is {Config.MAX_TERMS}")


class KrausChannel(_ChannelBase):
    """
    Channel in Kraus form X -> sum_k E_k X E_k*.

    Attributes:
        kraus: Kraus operators, each dim_out x dim_in
    """

    representation: Literal["kraus"] = "kraus"
    kraus: List[Matrix]

    @model_validator(mode='after')
    def validate_shapes(self):
        _check_terms(len(self.kraus), "kraus")
        for k, op in enumerate(self.kraus):
            if op.shape != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"kraus[{k}] has shape {op.shape}, expected {(self.dim_out, self.dim_in)}"
                )
        return self


class HolevoChannel(_ChannelBase):
    """
    Channel in measure-and-prepare form X -> sum_k R_k Tr(F_k X).

    Attributes:
        states: Preparation states R_k, each dim_out x dim_out
        effects: POVM effects F_k, each dim_in x dim_in
    """

    representation: Literal["holevo"] = "holevo"
    states: List[Matrix]
    effects: List[Matrix]

    @model_validator(mode='after')
    def validate_shapes(self):
        if len(self.states) != len(self.effects):
            raise ValueError(
                f"{len(self.states)} states but {len(self.effects)} effects"
            )
        _check_terms(len(self.states), "holevo")
        for k, (state, effect) in enumerate(zip(self.states, self.effects)):
            if state.shape != (self.dim_out, self.dim_out):
                raise ValueError(f"states[{k}] has shape {state.shape}")
            if effect.shape != (self.dim_in, self.dim_in):
                raise ValueError(f"effects[{k}] has shape {effect.shape}")
        return self

    @property
    def pairs(self):
        return list(zip(self.states, self.effects))


class WeightedChoi(_ChannelBase):
    """
    Weighted Choi state sigma = sum_ij sqrt(l_i l_j) e_i e_j* (x) Phi(e_i e_j*).

    The input factor is indexed slowest.
    """

    representation: Literal["choi"] = "choi"
    weights: RealVector
    sigma: Matrix

    @model_validator(mode='after')
    def validate_shapes(self):
        if self.weights.shape != (self.dim_in,):
            raise ValueError(f"weights must have length {self.dim_in}")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        size = self.dim_in * self.dim_out
        if self.sigma.shape != (size, size):
            raise ValueError(f"sigma has shape {self.sigma.shape}, expected {(size, size)}")
        return self

    @property
    def dim(self) -> int:
        return self.dim_in


Channel = Union[KrausChannel, HolevoChannel, WeightedChoi]


class SebTerm(FrozenModel):
    """One kept term p_k rho_k (x) v_k v_k* of the separable decomposition."""

    index: int = Field(..., ge=1, description="1-based term index k")
    probability: float = Field(..., gt=0.0)
    state: Matrix
    vector: Vector


class SebDecomposition(_ChannelBase):
    """
    Certified measure-and-prepare decomposition of a commutative-range channel.

    Attributes:
        unitary: Joint diagonalizer U; column k is v_k
        weights: Choi weights lambda
        terms: Kept terms (p_k, rho_k, v_k)
        effects: POVM effects F_k for every k (dropped terms included)
        preparations: R_k = v_k v_k* for every k
        dropped_mass: Sum of discarded p_k
    """

    unitary: Matrix
    weights: RealVector
    terms: List[SebTerm]
    effects: List[Matrix]
    preparations: List[Matrix]
    dropped_mass: float = Field(..., ge=0.0)

    def to_holevo(self) -> HolevoChannel:
        """The certified Holevo form (R_k, F_k)."""
        return HolevoChannel(
            dim_in=self.dim_in,
            dim_out=self.dim_out,
            states=list(self.preparations),
            effects=list(self.effects),
        )


class SubspaceSpec(FrozenModel):
    """Complex span of Hermitian-closed trace-zero generators."""

    dim: int = Field(..., gt=0)
    generators: List[Matrix] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_shapes(self):
        for j, gen in enumerate(self.generators):
            if gen.shape != (self.dim, self.dim):
                raise ValueError(f"generators[{j}] has shape {gen.shape}")
        return self


class NullspaceChannel(FrozenModel):
    """Synthesized channel whose null space is a prescribed subspace."""

    channel: HolevoChannel
    effects_basis: List[Matrix]
    f_tilde: List[Matrix]
    lambda_min_f1: float

    @property
    def output_dim(self) -> int:
        return self.channel.dim_out


class DilationResult(_ChannelBase):
    """
    Isometry into E = m copies of the input space plus the preparations.

    Attributes:
        isometry: (d*m) x d matrix stacking sqrt(F_k) blocks
        block_count: m
        preparations: R_k of the source channel
        dilation_dim: d*m
    """

    isometry: Matrix
    block_count: int = Field(..., gt=0)
    preparations: List[Matrix]
    dilation_dim: int = Field(..., gt=0)

    @model_validator(mode='after')
    def validate_shapes(self):
        if self.dilation_dim != self.dim_in * self.block_count:
            raise ValueError("dilation_dim must equal dim_in * block_count")
        if self.isometry.shape != (self.dilation_dim, self.dim_in):
            raise ValueError(f"isometry has shape {self.isometry.shape}")
        if len(self.preparations) != self.block_count:
            raise ValueError("one preparation per block required")
        return self


class RankOneKraus(_ChannelBase):
    """Rank-one Kraus form E_k = u_k v_k* with unit u_k."""

    u_vectors: List[Vector]
    v_vectors: List[Vector]

    @model_validator(mode='after')
    def validate_shapes(self):
        if len(self.u_vectors) != len(self.v_vectors):
            raise ValueError("u_vectors and v_vectors differ in length")
        _check_terms(len(self.u_vectors), "rank-one kraus")
        for k, (u, v) in enumerate(zip(self.u_vectors, self.v_vectors)):
            if u.shape != (self.dim_out,) or v.shape != (self.dim_in,):
                raise ValueError(f"pair {k} has shapes {u.shape}, {v.shape}")
        return self

    @property
    def kraus_operators(self) -> List[np.ndarray]:
        return [np.outer(u, v.conj()) for u, v in zip(self.u_vectors, self.v_vectors)]

    def to_kraus(self) -> KrausChannel:
        return KrausChannel(
            dim_in=self.dim_in, dim_out=self.dim_out, kraus=self.kraus_operators
        )
