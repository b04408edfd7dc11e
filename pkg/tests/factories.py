"""Seeded random constructors shared by the test suite."""

from typing import List, Tuple

import numpy as np
from scipy.stats import unitary_group

from src.models.schema import HolevoChannel, KrausChannel, RankOneKraus, SubspaceSpec

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def random_unitary(dim: int, seed: int) -> np.ndarray:
    if dim == 1:
        return np.eye(1, dtype=np.complex128)
    return unitary_group.rvs(dim, random_state=seed)


def random_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = random_matrix(rng, dim, dim)
    return (g + g.conj().T) / 2.0


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = random_matrix(rng, dim, dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_povm(rng: np.random.Generator, dim: int, count: int) -> List[np.ndarray]:
    """Effects S^-1/2 A_k S^-1/2 with A_k = G_k G_k* and S = sum_k A_k."""
    parts = []
    for _ in range(count):
        g = random_matrix(rng, dim, dim)
        parts.append(g @ g.conj().T)
    w, v = np.linalg.eigh(sum(parts))
    inv_root = (v / np.sqrt(w)) @ v.conj().T
    effects = []
    for a in parts:
        f = inv_root @ a @ inv_root
        effects.append((f + f.conj().T) / 2.0)
    return effects


def random_holevo(seed: int, dim_in: int, dim_out: int, count: int) -> HolevoChannel:
    rng = np.random.default_rng(seed)
    return HolevoChannel(
        dim_in=dim_in,
        dim_out=dim_out,
        states=[random_state(rng, dim_out) for _ in range(count)],
        effects=random_povm(rng, dim_in, count),
    )


def random_commutative_holevo(seed: int, dim: int, count: int) -> HolevoChannel:
    """Holevo channel whose states are diagonal in one common random basis."""
    rng = np.random.default_rng(seed)
    basis = random_unitary(dim, seed)
    states = []
    for _ in range(count):
        q = rng.dirichlet(np.ones(dim))
        states.append((basis * q) @ basis.conj().T)
    return HolevoChannel(
        dim_in=dim, dim_out=dim, states=states, effects=random_povm(rng, dim, count)
    )


def near_commutative_holevo(seed: int, dim: int, count: int, eps: float) -> HolevoChannel:
    """
    Commuting states with spectra bounded below by 1/(2 dim), each moved by eps * H.

    H is traceless Hermitian with unit Frobenius norm, so states stay PSD and
    every image commutator is at most 4 eps.
    """
    rng = np.random.default_rng(seed)
    basis = random_unitary(dim, seed)
    states = []
    for _ in range(count):
        q = 0.5 * rng.dirichlet(np.ones(dim)) + 0.5 / dim
        h = random_hermitian(rng, dim)
        h -= np.trace(h).real / dim * np.eye(dim)
        states.append((basis * q) @ basis.conj().T + eps * h / np.linalg.norm(h))
    return HolevoChannel(
        dim_in=dim, dim_out=dim, states=states, effects=random_povm(rng, dim, count)
    )


def traceless_subspace(seed: int, dim: int, size: int) -> SubspaceSpec:
    """Self-adjoint span of `size` random traceless Hermitian matrices, mixed complexly."""
    rng = np.random.default_rng(seed)
    hermitian = []
    for _ in range(size):
        h = random_hermitian(rng, dim)
        hermitian.append(h - np.trace(h).real / dim * np.eye(dim))
    generators = []
    for j, h in enumerate(hermitian):
        partner = hermitian[(j + 1) % size]
        generators.append(h + 0.5j * partner if j % 2 == 0 else h)
    return SubspaceSpec(dim=dim, generators=generators)


def block_rank_one_channel(seed: int, sizes: Tuple[int, ...]) -> Tuple[RankOneKraus, List[np.ndarray]]:
    """
    Rank-one Kraus channel preserving a block decomposition of C^d.

    Each block carries v_k from the columns of a random unitary and unit
    u_k drawn inside the same block.

    Returns:
        (channel, block projections)
    """
    rng = np.random.default_rng(seed)
    dim = sum(sizes)
    u_vectors, v_vectors, projections = [], [], []
    offset = 0
    for b, size in enumerate(sizes):
        block = slice(offset, offset + size)
        w = random_unitary(size, seed + b)
        for k in range(size):
            v = np.zeros(dim, dtype=np.complex128)
            v[block] = w[:, k]
            u = np.zeros(dim, dtype=np.complex128)
            u[block] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            u_vectors.append(u / np.linalg.norm(u))
            v_vectors.append(v)
        p = np.zeros((dim, dim), dtype=np.complex128)
        p[block, block] = np.eye(size)
        projections.append(p)
        offset += size
    return RankOneKraus(dim_in=dim, dim_out=dim, u_vectors=u_vectors, v_vectors=v_vectors), projections


def rotated_projection(p: np.ndarray, seed: int, angle: float = 0.3) -> np.ndarray:
    """p conjugated by exp(i * angle * H) for a random Hermitian H."""
    rng = np.random.default_rng(seed)
    w, v = np.linalg.eigh(random_hermitian(rng, p.shape[0]))
    rotation = (v * np.exp(1j * angle * w)) @ v.conj().T
    return rotation @ p @ rotation.conj().T


def dephasing(dim: int) -> KrausChannel:
    kraus = []
    for k in range(dim):
        e = np.zeros((dim, dim))
        e[k, k] = 1.0
        kraus.append(e)
    return KrausChannel(dim_in=dim, dim_out=dim, kraus=kraus)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(dim_in=dim, dim_out=dim, kraus=[np.eye(dim)])


def prepare_state(rho: np.ndarray) -> HolevoChannel:
    dim = rho.shape[0]
    return HolevoChannel(dim_in=dim, dim_out=dim, states=[rho], effects=[np.eye(dim)])
