"""Two-qubit state representations, Pauli algebra, and random-state sampling.

Conventions (fixed once, used everywhere):

* product basis order ``|00>, |01>, |10>, |11>`` with the first qubit
  belonging to Alice;
* Pauli operators ``SIGMA[0..3]`` = identity, sigma_x, sigma_y, sigma_z,
  with ``{|0>, |1>}`` the sigma_z eigenbasis;
* the correlation picture of a state rho is the real 4x4 matrix
  ``R[i, j] = Tr[(sigma_i (x) sigma_j) rho]``, whose first column holds
  Alice's Bloch vector ``a``, first row Bob's Bloch vector ``b``, and
  lower-right 3x3 block the correlation matrix ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotHermitian, NotPositive, TraceNotOne, ZeroProbability

SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# PAULI_KRON[i, j] = sigma_i (x) sigma_j, the 16-element operator basis.
PAULI_KRON = np.array([[np.kron(SIGMA[i], SIGMA[j]) for j in range(4)] for i in range(4)])

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A validated 4x4 two-qubit density matrix (see :func:`validate_state`)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))


@dataclass(frozen=True)
class RMatrix:
    """Pauli-correlation picture of a two-qubit state.

    ``r`` is real 4x4 with ``r[0, 0] == 1``; views ``a`` (Alice Bloch),
    ``b`` (Bob Bloch) and ``t`` (correlation matrix) index into it.
    """

    r: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.r, dtype=float)
        if arr.shape != (4, 4):
            raise DomainError(f"R matrix must be 4x4, got shape {arr.shape}")
        object.__setattr__(self, "r", arr)

    @property
    def a(self) -> np.ndarray:
        return self.r[1:, 0]

    @property
    def b(self) -> np.ndarray:
        return self.r[0, 1:]

    @property
    def t(self) -> np.ndarray:
        return self.r[1:, 1:]


@dataclass(frozen=True)
class SeededRng:
    """Deterministic random source addressed by (seed, stream).

    Identical (seed, stream) pairs always reproduce the same sample
    sequence; distinct streams are statistically independent, which is how
    sweeps partition work across workers without sharing state.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh numpy generator for this (seed, stream) pair."""
        return np.random.default_rng(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,)))

    def with_stream(self, stream: int) -> "SeededRng":
        return SeededRng(self.seed, stream)


def validate_state(m: np.ndarray, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check the three density-matrix invariants and wrap the input.

    The matrix is returned unchanged (no projection or repair): a state
    that fails Hermiticity, unit trace, or positivity raises the matching
    error with the measured deviation.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise DomainError(f"state must be a 4x4 matrix, got shape {m.shape}")
    herm_dev = np.abs(m - m.conj().T).max()
    if herm_dev > tol:
        raise NotHermitian(f"max |rho - rho^dag| = {herm_dev:.3e} exceeds {tol:.1e}")
    trace_dev = abs(m.trace() - 1.0)
    if trace_dev > tol:
        raise TraceNotOne(f"|Tr rho - 1| = {trace_dev:.3e} exceeds {tol:.1e}")
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    if min_eig < -tol:
        raise NotPositive(f"min eigenvalue {min_eig:.3e} below -{tol:.1e}")
    return DensityMatrix(m)


def to_r_picture(rho: DensityMatrix) -> RMatrix:
    """Pauli-correlation picture R[i, j] = Tr[(sigma_i (x) sigma_j) rho]."""
    m = rho.matrix
    r = np.einsum("ijkl,lk->ij", PAULI_KRON, m).real
    r[0, 0] = 1.0
    return RMatrix(r)


def from_r_picture(r: RMatrix, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Reconstruct rho = (1/4) sum_ij R_ij sigma_i (x) sigma_j.

    Raises NotPositive when R does not correspond to a physical state.
    """
    if abs(r.r[0, 0] - 1.0) > 1e-10:
        raise DomainError(f"R[0,0] must be 1, got {r.r[0, 0]!r}")
    m = 0.25 * np.einsum("ij,ijkl->kl", r.r, PAULI_KRON)
    return validate_state(m, tol)


def ginibre_states(gen: np.random.Generator, count: int, ranks: int | np.ndarray) -> np.ndarray:
    """Batch of Ginibre random states G G^dag / Tr as a (count, 4, 4) array.

    ``ranks`` is a scalar or per-sample array in 1..4; rank 4 yields the
    Hilbert-Schmidt ensemble. Random draws always consume the same number
    of variates per sample regardless of rank, so mixed-rank streams stay
    aligned and reproducible.
    """
    ranks = np.broadcast_to(np.asarray(ranks, dtype=np.int64), (count,))
    if ranks.size and (ranks.min() < 1 or ranks.max() > 4):
        raise DomainError("rank must be in 1..4")
    g = gen.standard_normal((count, 4, 4)) + 1j * gen.standard_normal((count, 4, 4))
    g *= np.arange(4)[None, None, :] < ranks[:, None, None]
    rho = g @ g.conj().transpose(0, 2, 1)
    tr = np.einsum("nii->n", rho).real
    return rho / tr[:, None, None]


def sample_state(rng: SeededRng, rank: int = 4) -> DensityMatrix:
    """One Ginibre random state; a pure function of (seed, stream, rank)."""
    if rank not in (1, 2, 3, 4):
        raise DomainError(f"rank must be in 1..4, got {rank}")
    return validate_state(ginibre_states(rng.generator(), 1, rank)[0])


def sample_states(rng: SeededRng, count: int, rank: int = 4) -> np.ndarray:
    """(count, 4, 4) batch of Ginibre states from a single stream."""
    if rank not in (1, 2, 3, 4):
        raise DomainError(f"rank must be in 1..4, got {rank}")
    return ginibre_states(rng.generator(), count, rank)


def steered_bloch(r: RMatrix, gamma: np.ndarray) -> tuple[np.ndarray, float]:
    """Bob's conditional Bloch vector when Alice applies the POVM effect
    (1 + gamma . sigma)/2.

    Returns (bloch, probability) with probability (1 + a.gamma)/2 and
    bloch = (b + T^T gamma) / (2 probability). Raises ZeroProbability for
    outcomes that never occur.
    """
    gamma = np.asarray(gamma, dtype=float)
    norm = np.linalg.norm(gamma)
    if norm > 1.0 + 1e-10:
        raise DomainError(f"|gamma| = {norm:.12f} exceeds 1")
    p = 0.5 * (1.0 + r.a @ gamma)
    if p <= 1e-12:
        raise ZeroProbability(f"steering outcome probability {p:.3e} <= 1e-12")
    bloch = (r.b + r.t.T @ gamma) / (2.0 * p)
    return bloch, float(p)


def bloch_of_qubit(rho2: np.ndarray) -> np.ndarray:
    """Bloch vector of a single-qubit density matrix."""
    return np.array([2 * rho2[0, 1].real, -2 * rho2[0, 1].imag, (rho2[0, 0] - rho2[1, 1]).real])


def partial_trace(rho: DensityMatrix, keep: str) -> np.ndarray:
    """2x2 reduced state of qubit ``"A"`` or ``"B"``."""
    m = rho.matrix.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ikjk->ij", m)
    if keep == "B":
        return np.einsum("kikj->ij", m)
    raise DomainError(f"keep must be 'A' or 'B', got {keep!r}")
