import math

import numpy as np
import pytest

from hqc import DensityMatrix, LocalFilter, validate_state


def singlet_matrix() -> np.ndarray:
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0 / math.sqrt(2.0)
    psi[2] = -1.0 / math.sqrt(2.0)
    return np.outer(psi, psi.conj())


def ket00_matrix() -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[0] = 1.0
    return np.outer(v, v.conj())


def werner_matrix(w: float) -> np.ndarray:
    return w * singlet_matrix() + (1.0 - w) * np.eye(4, dtype=complex) / 4.0


@pytest.fixture
def singlet() -> DensityMatrix:
    return validate_state(singlet_matrix())


@pytest.fixture
def ket00() -> DensityMatrix:
    return validate_state(ket00_matrix())


@pytest.fixture
def maximally_mixed() -> DensityMatrix:
    return validate_state(np.eye(4, dtype=complex) / 4.0)


def haar_unitary_2(gen: np.random.Generator) -> np.ndarray:
    z = gen.standard_normal((2, 2)) + 1j * gen.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def bounded_random_filter(gen: np.random.Generator, d_min: float = 0.2) -> LocalFilter:
    """Random invertible filter with singular values in [d_min, 1].

    Bounding the condition number keeps the numerical drift of invariance
    checks far below their tolerances.
    """
    d = gen.uniform(d_min, 1.0)
    return LocalFilter.from_matrix(haar_unitary_2(gen) @ np.diag([1.0, d]) @ haar_unitary_2(gen))


def rotation_of_unitary(u: np.ndarray) -> np.ndarray:
    """SO(3) image of a single-qubit unitary acting on Bloch vectors."""
    from hqc import SIGMA

    return np.array(
        [[0.5 * np.trace(SIGMA[i + 1] @ u @ SIGMA[j + 1] @ u.conj().T).real for j in range(3)] for i in range(3)]
    )
