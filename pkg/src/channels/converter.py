"""Conversions among the Kraus, Holevo and weighted-Choi representations."""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..config import Config
from ..errors import CertificationFailure, NotHermitian, NotPSDInput, NotRankOne
from ..linalg.spectral import SpectralSolver
from ..models.schema import (
    Channel,
    HolevoChannel,
    KrausChannel,
    RankOneKraus,
    Tolerances,
    WeightedChoi,
)
from .evaluator import ChannelEvaluator


class ChannelConverter:
    """
    Converts channels between representations.

    Holevo -> Kraus always succeeds for PSD inputs and yields rank-one
    operators; Kraus -> Holevo requires every operator to be rank one.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the converter.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
        """
        self.tol = tolerances or Config.default_tolerances()
        self.solver = SpectralSolver(self.tol)
        self.evaluator = ChannelEvaluator(self.tol)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def _spectrum(self, a: np.ndarray, path: str) -> Tuple[np.ndarray, np.ndarray]:
        try:
            dec = self.solver.eigh(a)
        except NotHermitian as e:
            raise NotPSDInput(f"{path} is not Hermitian", {'path': path, **e.details})
        if dec.eigenvalues[-1] < -self.tol.eps_psd:
            raise NotPSDInput(
                f"{path} has eigenvalue {dec.eigenvalues[-1]:.3e}",
                {'path': path, 'lambda_min': float(dec.eigenvalues[-1])},
            )
        keep = dec.eigenvalues > self.tol.eps_rank
        return dec.eigenvalues[keep], dec.eigenvectors[:, keep]

    def holevo_to_kraus(self, ch: HolevoChannel) -> KrausChannel:
        """
        Expand each pair (R_k, F_k) into rank-one Kraus operators.

        With R_k = sum_a q_a u_a u_a* and F_k = sum_b m_b w_b w_b*, the
        operators are sqrt(q_a m_b) u_a w_b*.

        Raises:
            NotPSDInput: If some R_k or F_k is not PSD
        """
        ops: List[np.ndarray] = []
        for k, (state, effect) in enumerate(ch.pairs):
            q, u = self._spectrum(state, f"holevo.states[{k}]")
            mu, w = self._spectrum(effect, f"holevo.effects[{k}]")
            for a in range(q.size):
                for b in range(mu.size):
                    ops.append(np.sqrt(q[a] * mu[b]) * np.outer(u[:, a], w[:, b].conj()))

        if not ops:
            raise CertificationFailure("Holevo channel expands to no Kraus operators")
        if len(ops) > Config.MAX_TERMS:
            raise CertificationFailure(
                f"Rank-one expansion has {len(ops)} operators, cap is {Config.MAX_TERMS}",
                {'count': len(ops)},
            )
        self.logger.debug(f"Expanded {len(ch.states)} Holevo pairs into {len(ops)} Kraus operators")
        return KrausChannel(dim_in=ch.dim_in, dim_out=ch.dim_out, kraus=ops)

    def rank_one_factor(self, op: np.ndarray, index: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """
        Write op = u v* with ||u|| = 1 and u's first nonzero entry real positive.

        Returns:
            (u, v), or None for a numerically zero operator

        Raises:
            NotRankOne: If sigma_2 > eps_rank * sigma_1
        """
        left, singular, right_h = scipy.linalg.svd(op)
        if singular[0] <= self.tol.eps_rank:
            return None
        ratio = float(singular[1] / singular[0]) if singular.size > 1 else 0.0
        if ratio > self.tol.eps_rank:
            raise NotRankOne(
                f"Kraus operator {index} is not rank one (sigma2/sigma1 = {ratio:.3e})",
                {'index': index, 'ratio': ratio},
            )
        u = left[:, 0]
        v = singular[0] * right_h[0].conj()
        lead = u[np.flatnonzero(np.abs(u) > self.tol.eps_rank)[0]]
        phase = np.conj(lead) / abs(lead)
        return u * phase, v * phase

    def kraus_to_holevo(self, ch: KrausChannel) -> HolevoChannel:
        """
        Convert rank-one Kraus operators E_k = u_k v_k* into pairs (u_k u_k*, v_k v_k*).

        Raises:
            NotRankOne: With the offending index and sigma_2/sigma_1 ratio
        """
        states, effects = [], []
        for k, op in enumerate(ch.kraus):
            factor = self.rank_one_factor(op, k)
            if factor is None:
                continue
            u, v = factor
            states.append(np.outer(u, u.conj()))
            effects.append(np.outer(v, v.conj()))
        if not states:
            raise CertificationFailure("All Kraus operators vanish")
        return HolevoChannel(dim_in=ch.dim_in, dim_out=ch.dim_out, states=states, effects=effects)

    def choi_to_kraus(self, choi: WeightedChoi) -> KrausChannel:
        """
        Kraus operators from the eigen-decomposition of the weighted Choi state.

        sigma = sum_k y_k y_k* with y_k[(i, a)] = sqrt(l_i) (E_k)_{a i}.

        Raises:
            NotPSDInput: If sigma is not PSD (the map is not completely positive)
        """
        w, vecs = self._spectrum(choi.sigma, "choi.sigma")
        roots = np.sqrt(choi.weights)
        ops = []
        for k in range(w.size):
            y = (np.sqrt(w[k]) * vecs[:, k]).reshape(choi.dim_in, choi.dim_out)
            ops.append((y / roots[:, None]).T)
        return KrausChannel(dim_in=choi.dim_in, dim_out=choi.dim_out, kraus=ops)

    def to_kraus(self, ch: Channel) -> KrausChannel:
        if isinstance(ch, KrausChannel):
            return ch
        if isinstance(ch, HolevoChannel):
            return self.holevo_to_kraus(ch)
        return self.choi_to_kraus(ch)

    def to_holevo(self, ch: Channel) -> HolevoChannel:
        if isinstance(ch, HolevoChannel):
            return ch
        return self.kraus_to_holevo(self.to_kraus(ch))

    def to_choi(self, ch: Channel, weights: Optional[Sequence[float]] = None) -> WeightedChoi:
        if isinstance(ch, WeightedChoi) and weights is None:
            return ch
        return self.evaluator.weighted_choi(ch, weights)

    def convert(self, ch: Channel, target: str) -> Channel:
        """Convert to 'kraus', 'holevo' or 'choi'."""
        converters = {'kraus': self.to_kraus, 'holevo': self.to_holevo, 'choi': self.to_choi}
        if target not in converters:
            raise ValueError(f"Unknown representation '{target}'")
        return converters[target](ch)

    def to_rank_one_kraus(self, ch: Channel) -> RankOneKraus:
        """
        Rank-one Kraus form (u_k, v_k) of a channel.

        Raises:
            NotRankOne: If the Kraus presentation is not rank one
        """
        kraus = self.to_kraus(ch)
        u_vectors, v_vectors = [], []
        for k, op in enumerate(kraus.kraus):
            factor = self.rank_one_factor(op, k)
            if factor is not None:
                u_vectors.append(factor[0])
                v_vectors.append(factor[1])
        if not u_vectors:
            raise CertificationFailure("All Kraus operators vanish")
        return RankOneKraus(
            dim_in=ch.dim_in, dim_out=ch.dim_out, u_vectors=u_vectors, v_vectors=v_vectors
        )
