"""Quantum steering ellipsoids for either party of a two-qubit state.

Bob's steering ellipsoid is the set of Bloch vectors his conditional state
can be steered to by measurements on Alice's side. It is an ellipsoid with

    centre  c_B = gamma^2 (b - T^T a),        gamma^2 = 1 / (1 - |a|^2),
    matrix  Q_B = gamma^2 (T^T - b a^T)(1 + gamma^2 a a^T)(T - a b^T),

whose semiaxis lengths are the square roots of Q's eigenvalues. Alice's
ellipsoid follows by swapping a <-> b and T -> T^T. When the steering
party's marginal is pure the state is product-like and every steered state
collapses to a single point; that limit is represented by a degenerate
ellipsoid with q = 0 and centre at the steered party's Bloch vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateEllipsoid, DomainError
from .states import RMatrix


class Party(Enum):
    A = "A"
    B = "B"

    def other(self) -> "Party":
        return Party.B if self is Party.A else Party.A


@dataclass(frozen=True)
class SteeringEllipsoid:
    """Centre, matrix, and derived geometry of one party's ellipsoid."""

    centre: np.ndarray
    q: np.ndarray
    gamma_sq: float
    semiaxes: np.ndarray  # decreasing
    degenerate: bool


def compute_ellipsoid(r: RMatrix, party: Party, tol: float = 1e-9) -> SteeringEllipsoid:
    """Steering ellipsoid of ``party`` for the state with picture ``r``.

    ``tol`` is the degeneracy threshold on 1 - |steering Bloch|^2; below
    it the point-ellipsoid convention applies (flag, never an error).
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if party is Party.B:
        steer, steered, t = r.a, r.b, r.t
    else:
        steer, steered, t = r.b, r.a, r.t.T
    denom = 1.0 - float(steer @ steer)
    if denom <= tol:
        return SteeringEllipsoid(
            centre=steered.copy(),
            q=np.zeros((3, 3)),
            gamma_sq=math.inf,
            semiaxes=np.zeros(3),
            degenerate=True,
        )
    gamma_sq = 1.0 / denom
    centre = gamma_sq * (steered - t.T @ steer)
    q = gamma_sq * (t.T - np.outer(steered, steer)) @ (np.eye(3) + gamma_sq * np.outer(steer, steer)) @ (
        t - np.outer(steer, steered)
    )
    q = 0.5 * (q + q.T)  # kill roundoff asymmetry before eigensolving
    eigs = np.linalg.eigvalsh(q)
    semiaxes = np.sqrt(np.clip(eigs, 0.0, None))[::-1]
    return SteeringEllipsoid(centre=centre, q=q, gamma_sq=gamma_sq, semiaxes=semiaxes, degenerate=False)


def centre_magnitude(e: SteeringEllipsoid) -> float:
    """Euclidean norm of the ellipsoid centre."""
    return float(np.linalg.norm(e.centre))


def surface_residual(e: SteeringEllipsoid, point: np.ndarray) -> float:
    """(point - centre)^T Q^-1 (point - centre) - 1.

    Zero (within tolerance) iff the point lies on the ellipsoid surface;
    negative inside, positive outside. Requires an invertible Q.
    """
    if e.degenerate:
        raise DegenerateEllipsoid("ellipsoid is a point; surface residual undefined")
    eigs = np.linalg.eigvalsh(e.q)
    if eigs.min() <= 1e-10:
        raise DegenerateEllipsoid(f"ellipsoid matrix not invertible (min eigenvalue {eigs.min():.3e})")
    d = np.asarray(point, dtype=float) - e.centre
    return float(d @ np.linalg.solve(e.q, d) - 1.0)
