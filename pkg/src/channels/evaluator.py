"""Channel evaluation: action, dual action, Choi state and CPTP checks.

Every representation is reduced to the same primitive, the array of
matrix-unit images M[i, j] = Phi(e_i e_j*), whenever a representation
independent answer is needed.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..config import Config
from ..errors import BadWeights
from ..linalg.spectral import SpectralSolver
from ..linalg.tensor import check_shape, dagger, frobenius, partial_trace_second
from ..models.reports import CptpReport
from ..models.schema import Channel, HolevoChannel, KrausChannel, Tolerances, WeightedChoi


def uniform_weights(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def _stack(matrices) -> np.ndarray:
    return np.asarray(matrices, dtype=np.complex128)


def _weight_roots(weights: np.ndarray) -> np.ndarray:
    return np.sqrt(np.outer(weights, weights))


class ChannelEvaluator:
    """
    Evaluates channels given in any of the three representations.

    Handles:
    - Action X -> Phi(X) and dual action Y -> Phi*(Y)
    - Matrix-unit images and natural (superoperator) matrices
    - Weighted Choi states
    - CPTP verification
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the evaluator.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.solver = SpectralSolver(self.tol)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def apply(self, ch: Channel, x) -> np.ndarray:
        """
        Apply the channel to a dim_in x dim_in operator.

        Raises:
            DimensionMismatch: If x has the wrong shape
        """
        x = check_shape(x, (ch.dim_in, ch.dim_in), "x")

        if isinstance(ch, KrausChannel):
            ops = _stack(ch.kraus)
            return np.einsum('kab,bc,kdc->ad', ops, x, ops.conj())
        if isinstance(ch, HolevoChannel):
            outcomes = np.einsum('kij,ji->k', _stack(ch.effects), x)
            return np.einsum('k,kab->ab', outcomes, _stack(ch.states))

        blocks = ch.sigma.reshape(ch.dim_in, ch.dim_out, ch.dim_in, ch.dim_out)
        return np.einsum('ij,iajb->ab', x / _weight_roots(ch.weights), blocks)

    def apply_extended(self, ch: Channel, rho, ancilla_dim: int) -> np.ndarray:
        """
        Apply I (x) Phi to an operator on C^ancilla_dim (x) C^dim_in.

        Block (a, b) of the output is Phi of block (a, b) of the input.
        """
        size = ancilla_dim * ch.dim_in
        rho = check_shape(rho, (size, size), "rho")
        blocks = rho.reshape(ancilla_dim, ch.dim_in, ancilla_dim, ch.dim_in)
        images = self.matrix_unit_images(ch)
        out = np.einsum('aibj,ijcd->acbd', blocks, images)
        return out.reshape(ancilla_dim * ch.dim_out, ancilla_dim * ch.dim_out)

    def dual_apply(self, ch: Channel, y) -> np.ndarray:
        """
        Apply the dual (Heisenberg-picture) map to a dim_out x dim_out operator.

        Holevo form: sum_k Tr(R_k y) F_k.
        """
        y = check_shape(y, (ch.dim_out, ch.dim_out), "y")

        if isinstance(ch, HolevoChannel):
            outcomes = np.einsum('kij,ji->k', _stack(ch.states), y)
            return np.einsum('k,kab->ab', outcomes, _stack(ch.effects))
        if isinstance(ch, KrausChannel):
            ops = _stack(ch.kraus)
            return np.einsum('kai,ab,kbj->ij', ops.conj(), y, ops)

        # Phi*(y)_{ji} = Tr(M_ij y)
        pairing = np.einsum('ijab,ba->ij', self.matrix_unit_images(ch), y)
        return pairing.T

    def matrix_unit_images(self, ch: Channel) -> np.ndarray:
        """Array M with M[i, j] = Phi(e_i e_j*), shape (d, d, d', d')."""
        if isinstance(ch, KrausChannel):
            ops = _stack(ch.kraus)
            return np.einsum('kai,kbj->ijab', ops, ops.conj())
        if isinstance(ch, HolevoChannel):
            return np.einsum('kji,kab->ijab', _stack(ch.effects), _stack(ch.states))

        blocks = ch.sigma.reshape(ch.dim_in, ch.dim_out, ch.dim_in, ch.dim_out)
        images = blocks.transpose(0, 2, 1, 3)
        return images / _weight_roots(ch.weights)[:, :, None, None]

    def superoperator(self, ch: Channel) -> np.ndarray:
        """Natural matrix S with vec(Phi(X)) = S vec(X), row-major vec."""
        images = self.matrix_unit_images(ch)
        return images.transpose(2, 3, 0, 1).reshape(ch.dim_out ** 2, ch.dim_in ** 2)

    def dual_superoperator(self, ch: Channel) -> np.ndarray:
        """Natural matrix of the dual map, vec(Phi*(Y)) = S* vec(Y)."""
        images = self.matrix_unit_images(ch)
        return images.transpose(1, 0, 3, 2).reshape(ch.dim_in ** 2, ch.dim_out ** 2)

    def validated_weights(self, weights: Optional[Sequence[float]], dim: int) -> np.ndarray:
        if weights is None:
            return uniform_weights(dim)
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (dim,):
            raise BadWeights(f"expected {dim} weights, got {w.size}", {'count': int(w.size)})
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise BadWeights("weights must be finite and strictly positive",
                             {'weights': w.tolist()})
        if abs(w.sum() - 1.0) > 1e-12:
            raise BadWeights(f"weights sum to {w.sum():.15g}, not 1", {'sum': float(w.sum())})
        return w

    def weighted_choi(self, ch: Channel, weights: Optional[Sequence[float]] = None) -> WeightedChoi:
        """
        Weighted Choi state sigma = sum_ij sqrt(l_i l_j) e_i e_j* (x) Phi(e_i e_j*).

        Args:
            ch: Channel in any representation
            weights: Positive weights summing to 1 (default: uniform)

        Raises:
            BadWeights: If weights are invalid
        """
        w = self.validated_weights(weights, ch.dim_in)
        images = self.matrix_unit_images(ch)
        blocks = np.einsum('ij,ijab->iajb', _weight_roots(w), images)
        size = ch.dim_in * ch.dim_out
        return WeightedChoi(
            dim_in=ch.dim_in,
            dim_out=ch.dim_out,
            weights=w,
            sigma=blocks.reshape(size, size),
        )

    def tp_residual(self, ch: Channel) -> float:
        if isinstance(ch, KrausChannel):
            ops = _stack(ch.kraus)
            gram = np.einsum('kai,kaj->ij', ops.conj(), ops)
            return frobenius(gram - np.eye(ch.dim_in))
        if isinstance(ch, HolevoChannel):
            return frobenius(_stack(ch.effects).sum(axis=0) - np.eye(ch.dim_in))
        reduced = partial_trace_second(ch.sigma, ch.dim_in, ch.dim_out)
        return frobenius(reduced - np.diag(ch.weights))

    def verify_cptp(self, ch: Channel) -> CptpReport:
        """
        Check trace preservation and complete positivity.

        CP is read off the smallest eigenvalue of the uniform-weight Choi state.
        """
        tp = self.tp_residual(ch)
        sigma = self.weighted_choi(ch).sigma
        sigma = (sigma + dagger(sigma)) / 2.0
        cp = self.solver.lambda_min(sigma)
        ok = tp <= self.tol.eps_recon and cp >= -self.tol.eps_psd

        self.logger.info(
            f"CPTP check ({ch.representation}, {ch.dim_in}->{ch.dim_out}): "
            f"tp_residual={tp:.3e}, cp_lambda_min={cp:.3e}, ok={ok}"
        )
        if not ok:
            self.logger.warning("Channel is not CPTP within tolerance")
        return CptpReport(tp_residual=tp, cp_lambda_min=cp, ok=bool(ok))
