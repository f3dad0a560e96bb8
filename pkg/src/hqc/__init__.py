"""Hidden quantum correlations of two-qubit states.

Computes and certifies CHSH / F3-steering correlations, steering-ellipsoid
geometry, local-filtering normal forms and hidden-correlation measures,
one-sided filter optimisation, conjecture-testing random sweeps, and
parameter scans of three benchmark state families.
"""

from .correlations import (
    SingularTriple,
    brute_force_chsh,
    brute_force_f3,
    chsh_max,
    chsh_value,
    f3_max,
    f3_value,
    ppt_entangled,
    t_contract,
)
from .criteria import (
    InaccessibilityReport,
    OptimizerBudget,
    Thresholds,
    certify_inaccessible,
    classify,
    conjecture_bound_chsh,
)
from .ellipsoid import Party, SteeringEllipsoid, centre_magnitude, compute_ellipsoid, surface_residual
from .errors import (
    ComplexSpectrum,
    DegenerateEllipsoid,
    DegenerateNormalForm,
    DomainError,
    HqcError,
    NotHermitian,
    NotPositive,
    ParseError,
    TraceNotOne,
    ZeroProbability,
    ZeroSuccessProbability,
)
from .families import Family, ScanRow, paper_filter_rho_m, qd_centre_boundary, rho_m, rho_mm, rho_qd, scan_family
from .filtering import (
    LocalFilter,
    NormalFormSpectrum,
    Objective,
    OneSidedResult,
    apply_filters,
    apply_one_sided,
    hidden_chsh,
    hidden_f3,
    identity_filter,
    normal_form_r,
    normal_form_spectrum,
    optimize_one_sided,
)
from .montecarlo import EnvelopeRow, SweepConfig, SweepSummary, Violation, bin_envelope, run_sweep
from .states import (
    DensityMatrix,
    PAULI_KRON,
    RMatrix,
    SIGMA,
    SeededRng,
    from_r_picture,
    sample_state,
    sample_states,
    steered_bloch,
    to_r_picture,
    validate_state,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
