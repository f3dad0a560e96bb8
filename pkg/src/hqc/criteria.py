"""Centre-based inaccessibility certificates and the case taxonomy.

The working conjecture: a state's maximal CHSH value is bounded by
``f_CHSH(c) = max(sqrt(2(1-c)), 1)`` in the magnitude ``c`` of either
steering-ellipsoid centre, and no CHSH (F3) violation is possible at all
once ``c > 0.5`` (``c > 0.66``). Because a filter on one side leaves the
other side's ellipsoid invariant, a centre beyond threshold certifies that
the opposite party cannot reveal any violation by filtering alone. Every
such certificate is conditional on the conjecture, which is supported
numerically (see the montecarlo module) but unproven; reports carry a
``conjecture_conditional`` marker for that reason.

Certification is one-sided evidence: ``True`` means "certified
inaccessible (modulo the conjecture)", ``False`` means "not certified",
never "accessible". Accessibility claims require an explicit optimiser
witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .correlations import chsh_max, f3_max, ppt_entangled
from .ellipsoid import Party, centre_magnitude, compute_ellipsoid
from .errors import DegenerateNormalForm, DomainError
from .filtering import Objective, hidden_chsh, hidden_f3, optimize_one_sided
from .states import RMatrix, from_r_picture

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

# strict margin above the classical bound, to avoid flag flapping at 1
VIOLATION_MARGIN = 1e-8
CLASSICAL_MARGIN = 1e-10
MAXIMAL_MARGIN = 1e-8


@dataclass(frozen=True)
class Thresholds:
    """Centre-magnitude cutoffs beyond which no violation is possible.

    The F3 value is stored as the empirical literal 0.66 (not 2/3); both
    fields may be overridden since they were extracted from numerics.
    """

    c_chsh: float = 0.5
    c_f3: float = 0.66

    def __post_init__(self) -> None:
        if not (0.0 < self.c_chsh < self.c_f3 < 1.0):
            raise DomainError(f"thresholds must satisfy 0 < c_chsh < c_f3 < 1, got {self.c_chsh}, {self.c_f3}")


@dataclass(frozen=True)
class OptimizerBudget:
    """Search budget for optional one-sided accessibility witnesses."""

    starts: int = 32
    max_iters: int = 500
    tol: float = 1e-8
    seed: int = 0


@dataclass(frozen=True)
class InaccessibilityReport:
    """Per-state correlation values, centre magnitudes, and case flags.

    Flags (CHSH family; each has an F3 analogue):

    * ``NO_CHSH_VIOLATION``: no direct violation (b <= 1).
    * ``HIDDEN_CHSH``: no direct violation but the filtered optimum
      violates (case 1).
    * ``MAXIMAL_HIDDEN_CHSH``: the filtered optimum is the quantum maximum
      sqrt(2) (case 2; see note below).
    * ``A_INACCESSIBLE_CHSH`` / ``B_INACCESSIBLE_CHSH``: the named party is
      certified unable to reveal any violation alone (cases 3-4 evidence).
    * ``AB_INACCESSIBLE_CHSH``: both certificates hold (case 4; case 5
      when combined with MAXIMAL).
    * ``A_ACCESSIBLE_WITNESSED_CHSH`` etc. (only with an optimiser
      budget): the named party's one-sided optimiser exceeded the
      classical bound, witnessing accessibility.

    Normalisation note: some summaries quote the maximal hidden CHSH value
    as "2", which refers to the unnormalised Bell operator whose classical
    bound is 2; this package normalises the classical bound to 1, so the
    maximal value is sqrt(2) (and sqrt(3) for F3) throughout.

    Inaccessibility flags are valid modulo the centre-bound conjecture;
    ``conjecture_conditional`` is always True to flag this. Degenerate
    (point) ellipsoids are certified by the same rule using the
    point-ellipsoid centre, a convention this package adds for pure
    marginals.
    """

    b: float
    f3: float
    hb_star: float
    hf3_star: float
    c_a: float
    c_b: float
    entangled: bool
    flags: frozenset[str]
    thresholds: Thresholds
    degenerate_normal_form: bool = False
    conjecture_conditional: bool = True


def conjecture_bound_chsh(c: float) -> float:
    """Conjectured CHSH upper bound max(sqrt(2(1-c)), 1) at centre c."""
    if not 0.0 <= c <= 1.0:
        raise DomainError(f"centre magnitude must be in [0, 1], got {c}")
    return max(math.sqrt(2.0 * (1.0 - c)), 1.0)


def certify_inaccessible(r: RMatrix, target_party: Party, objective: Objective, th: Thresholds | None = None) -> bool:
    """Certify that ``target_party`` cannot reveal any hidden violation.

    A filter by the target leaves the *other* party's ellipsoid invariant,
    so the certificate compares the opposite ellipsoid's centre magnitude
    against the objective's threshold. True means certified (modulo the
    conjecture); False means unknown, never accessible.
    """
    th = th or Thresholds()
    witness = compute_ellipsoid(r, target_party.other())
    c = centre_magnitude(witness)
    cutoff = th.c_chsh if objective is Objective.CHSH else th.c_f3
    return c > cutoff


def classify(
    r: RMatrix,
    th: Thresholds | None = None,
    one_sided_budget: OptimizerBudget | None = None,
) -> InaccessibilityReport:
    """Full per-state report: values, certificates, and case flags."""
    th = th or Thresholds()
    rho = from_r_picture(r)
    b = chsh_max(r)[0]
    f3 = f3_max(r)
    degenerate = False
    try:
        hb = hidden_chsh(r)
        hf3 = hidden_f3(r)
    except DegenerateNormalForm:
        hb = math.nan
        hf3 = math.nan
        degenerate = True
    c_a = centre_magnitude(compute_ellipsoid(r, Party.A))
    c_b = centre_magnitude(compute_ellipsoid(r, Party.B))
    entangled, _ = ppt_entangled(rho)

    flags: set[str] = set()
    for name, value, hidden, maxval, cutoff in (
        ("CHSH", b, hb, SQRT2, th.c_chsh),
        ("F3", f3, hf3, SQRT3, th.c_f3),
    ):
        no_violation = value <= 1.0 + CLASSICAL_MARGIN
        if no_violation:
            flags.add(f"NO_{name}_VIOLATION")
        hidden_flag = no_violation and not math.isnan(hidden) and hidden > 1.0 + VIOLATION_MARGIN
        if hidden_flag:
            flags.add(f"HIDDEN_{name}")
            if hidden >= maxval - MAXIMAL_MARGIN:
                flags.add(f"MAXIMAL_HIDDEN_{name}")
        a_inacc = c_b > cutoff  # filters by Alice leave Bob's ellipsoid fixed
        b_inacc = c_a > cutoff
        if a_inacc:
            flags.add(f"A_INACCESSIBLE_{name}")
        if b_inacc:
            flags.add(f"B_INACCESSIBLE_{name}")
        if a_inacc and b_inacc:
            flags.add(f"AB_INACCESSIBLE_{name}")

    if one_sided_budget is not None:
        for party in (Party.A, Party.B):
            for objective in (Objective.CHSH, Objective.F3):
                res = optimize_one_sided(
                    rho,
                    party,
                    objective,
                    starts=one_sided_budget.starts,
                    max_iters=one_sided_budget.max_iters,
                    tol=one_sided_budget.tol,
                    seed=one_sided_budget.seed,
                )
                if res.value > 1.0 + 1e-6:
                    flags.add(f"{party.value}_ACCESSIBLE_WITNESSED_{objective.value}")

    return InaccessibilityReport(
        b=b,
        f3=f3,
        hb_star=hb,
        hf3_star=hf3,
        c_a=c_a,
        c_b=c_b,
        entangled=entangled,
        flags=frozenset(flags),
        thresholds=th,
        degenerate_normal_form=degenerate,
    )
