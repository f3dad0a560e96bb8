"""Local filtering, the Bell-diagonal normal form, and hidden correlations.

A local filter is an invertible 2x2 matrix f with f^dag f <= 1, applied as
a post-selected binary measurement; keeping the successful branch maps

    rho -> (f_A (x) f_B) rho (f_A (x) f_B)^dag / Tr[...].

Every two-qubit state has a unique Bell-diagonal normal form on its
filtering orbit; writing nu_0 >= nu_1 >= nu_2 >= nu_3 for the eigenvalues
of eta R eta R^T (eta = diag(1,-1,-1,-1)), the normal form's picture is
diag(1, -sqrt(nu_1/nu_0), -sqrt(nu_2/nu_0), -sqrt(nu_3/nu_0)) and its
correlation maxima

    hidden CHSH = sqrt((nu_1 + nu_2) / nu_0),
    hidden F3   = sqrt((nu_1 + nu_2 + nu_3) / nu_0)

are the best CHSH value reachable by two-sided filtering and a lower bound
on the best F3 value. One-sided optima (one party filters, the other does
nothing) have no closed form and are estimated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .correlations import chsh_max, f3_max
from .ellipsoid import Party
from .errors import ComplexSpectrum, DegenerateNormalForm, DomainError, ZeroSuccessProbability
from .states import DensityMatrix, RMatrix, to_r_picture, validate_state

ETA = np.diag([1.0, -1.0, -1.0, -1.0])

SCALE_FLOOR = 1e-4  # lower bound on the filter's small singular value during optimisation


class Objective(Enum):
    CHSH = "CHSH"
    F3 = "F3"


@dataclass(frozen=True)
class LocalFilter:
    """Invertible 2x2 filter, normalised to largest singular value 1."""

    f: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", np.asarray(self.f, dtype=complex))

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "LocalFilter":
        """Normalise and validate an arbitrary 2x2 matrix as a filter."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError(f"filter must be 2x2, got shape {m.shape}")
        smax = float(np.linalg.svd(m, compute_uv=False)[0])
        if smax <= 0.0:
            raise DomainError("filter is the zero matrix")
        f = m / smax
        det = abs(np.linalg.det(f))
        if det <= 1e-12:
            raise DomainError(f"filter not invertible: |det| = {det:.3e} after normalisation")
        return cls(f)


def identity_filter() -> LocalFilter:
    return LocalFilter(np.eye(2, dtype=complex))


class NormalFormSpectrum(NamedTuple):
    """Eigenvalues of eta R eta R^T, decreasing."""

    nu0: float
    nu1: float
    nu2: float
    nu3: float


@dataclass(frozen=True)
class OneSidedResult:
    """Best one-sided filtered correlation value found by the optimiser."""

    value: float
    filter: LocalFilter
    objective: Objective
    party: Party
    converged: bool
    starts_used: int
    at_scale_floor: bool  # optimiser pushed the filter scale to its floor; supremum may be on the boundary


def apply_filters(rho: DensityMatrix, fa: LocalFilter, fb: LocalFilter) -> tuple[DensityMatrix, float]:
    """Filtered state and success probability for filters on both sides."""
    op = np.kron(fa.f, fb.f)
    unnorm = op @ rho.matrix @ op.conj().T
    prob = float(unnorm.trace().real)
    if prob <= 1e-12:
        raise ZeroSuccessProbability(f"success probability {prob:.3e} <= 1e-12")
    return validate_state(unnorm / prob), prob


def apply_one_sided(rho: DensityMatrix, f: LocalFilter, party: Party) -> tuple[DensityMatrix, float]:
    """Filter on one side only; the other party applies the identity."""
    if party is Party.A:
        return apply_filters(rho, f, identity_filter())
    return apply_filters(rho, identity_filter(), f)


def normal_form_spectrum(r: RMatrix) -> NormalFormSpectrum:
    """Spectrum of eta R eta R^T, sorted decreasing.

    The matrix is not symmetric, and on some families (the
    quasi-distillable line in particular) it is defective: exact
    eigenvalue multiplicities split numerically by ~sqrt(machine eps),
    in a random direction in the complex plane. Small residues are
    therefore cleaned up in two scale-aware steps: imaginary parts below
    max(1e-8, 2e-7 |nu_max|) are truncated, and real values closer than
    2e-7 |nu_max| are merged to their cluster mean (which is accurate to
    second order for a defective pair). Larger imaginary parts or
    negative values signal an unphysical input and raise ComplexSpectrum.
    """
    m = ETA @ r.r @ ETA @ r.r.T
    w = np.linalg.eigvals(m)
    # Defective splits scale with sqrt(eps * ||M||), not with the eigenvalues.
    residue_tol = max(1e-8, 5e-7 * float(np.linalg.norm(m)))
    max_imag = float(np.abs(w.imag).max())
    if max_imag > residue_tol:
        raise ComplexSpectrum(f"max |Im eigenvalue| = {max_imag:.3e}; input unphysical")
    nu = np.sort(w.real)[::-1]
    if nu[-1] < -residue_tol:
        raise ComplexSpectrum(f"eigenvalue {nu[-1]:.3e} too negative; input unphysical")
    nu = np.clip(nu, 0.0, None)
    cluster_tol = residue_tol
    i = 0
    out = np.empty(4)
    while i < 4:
        j = i
        while j + 1 < 4 and nu[j] - nu[j + 1] <= cluster_tol:
            j += 1
        out[i : j + 1] = nu[i : j + 1].mean()
        i = j + 1
    return NormalFormSpectrum(*map(float, out))


def normal_form_r(r: RMatrix) -> RMatrix:
    """Correlation picture of the Bell-diagonal normal form."""
    nu = normal_form_spectrum(r)
    if nu.nu0 <= 1e-12:
        raise DegenerateNormalForm(f"leading eigenvalue {nu.nu0:.3e} <= 1e-12")
    d = np.array([1.0, -math.sqrt(nu.nu1 / nu.nu0), -math.sqrt(nu.nu2 / nu.nu0), -math.sqrt(nu.nu3 / nu.nu0)])
    return RMatrix(np.diag(d))


def hidden_chsh(r: RMatrix) -> float:
    """Maximal CHSH value reachable by two-sided local filtering."""
    nu = normal_form_spectrum(r)
    if nu.nu0 <= 1e-12:
        raise DegenerateNormalForm(f"leading eigenvalue {nu.nu0:.3e} <= 1e-12")
    return math.sqrt((nu.nu1 + nu.nu2) / nu.nu0)


def hidden_f3(r: RMatrix) -> float:
    """F3 value of the Bell-diagonal normal form (a lower bound on the
    two-sided filtered optimum, which is not known to be attained here)."""
    nu = normal_form_spectrum(r)
    if nu.nu0 <= 1e-12:
        raise DegenerateNormalForm(f"leading eigenvalue {nu.nu0:.3e} <= 1e-12")
    return math.sqrt((nu.nu1 + nu.nu2 + nu.nu3) / nu.nu0)


def _filter_from_params(x: np.ndarray) -> np.ndarray:
    """diag(d, 1) . V with V in SU(2); largest singular value is already 1.

    The left polar unitary of a general filter is dropped because the
    correlation maxima are invariant under local unitaries on the filtered
    state, and the overall scale cancels in the normalisation.
    """
    d, th, phi, psi = x
    ct, st = math.cos(th), math.sin(th)
    v = np.array(
        [
            [ct * complex(math.cos(phi), math.sin(phi)), st * complex(math.cos(psi), math.sin(psi))],
            [-st * complex(math.cos(psi), -math.sin(psi)), ct * complex(math.cos(phi), -math.sin(phi))],
        ]
    )
    return np.diag([d, 1.0]) @ v


def optimize_one_sided(
    rho: DensityMatrix,
    party: Party,
    objective: Objective,
    starts: int = 32,
    max_iters: int = 500,
    tol: float = 1e-8,
    seed: int = 0,
) -> OneSidedResult:
    """Maximise the filtered CHSH/F3 optimum over one party's filters.

    Multi-start Nelder-Mead over the 4-parameter chart (scale in
    (SCALE_FLOOR, 1], three SU(2) angles); start 0 is the identity filter,
    so the result never falls below the unfiltered value. Start seeds are
    deterministic in (seed, start index) and ties resolve to the lowest
    start index.
    """
    if starts < 1:
        raise DomainError(f"starts must be >= 1, got {starts}")
    maxval = math.sqrt(2.0) if objective is Objective.CHSH else math.sqrt(3.0)

    def value_of(x: np.ndarray) -> float:
        f = LocalFilter(_filter_from_params(x))
        try:
            filtered, _ = apply_one_sided(rho, f, party)
        except ZeroSuccessProbability:
            return -1.0
        r = to_r_picture(filtered)
        return chsh_max(r)[0] if objective is Objective.CHSH else f3_max(r)

    bounds = [(SCALE_FLOOR, 1.0), (None, None), (None, None), (None, None)]
    best_x = np.array([1.0, 0.0, 0.0, 0.0])
    best_val = value_of(best_x)
    converged = False
    for start in range(starts):
        if start == 0:
            x0 = np.array([1.0, 0.0, 0.0, 0.0])
        else:
            gen = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(start,)))
            x0 = np.array(
                [
                    gen.uniform(0.05, 1.0),
                    gen.uniform(0.0, math.pi / 2),
                    gen.uniform(-math.pi, math.pi),
                    gen.uniform(-math.pi, math.pi),
                ]
            )
        res = minimize(
            lambda x: -value_of(x),
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxiter": max_iters, "xatol": 1e-9, "fatol": tol * 1e-3},
        )
        converged = converged or bool(res.success)
        if -res.fun > best_val + 1e-15:
            best_val, best_x = -res.fun, res.x
        if best_val >= maxval - 1e-12:
            break  # cannot improve on the quantum maximum
    return OneSidedResult(
        value=float(best_val),
        filter=LocalFilter(_filter_from_params(best_x)),
        objective=objective,
        party=party,
        converged=converged,
        starts_used=starts,
        at_scale_floor=bool(best_x[0] <= SCALE_FLOOR * 1.01),
    )
