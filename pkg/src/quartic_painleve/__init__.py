"""quartic_painleve: a high-precision laboratory for orthogonal
polynomials with the varying quartic weight e^{-N(z^2/2 + t z^4/4)} on
complex contours, and for the Painleve I transcendents that govern their
recurrence coefficients in the critical double-scaling regime.
"""

from .precision import PrecisionContext
from .errors import (
    BranchCutError,
    DegenerateForm,
    DomainError,
    InsufficientData,
    LatticeBlowup,
    NonConvergence,
    PoleHit,
    PoleOnBoundary,
    SeedAccuracyError,
    SingularStart,
    StallError,
    StepUnderflow,
)
from .quadrature import PathPiece, QuadratureRule, integrate_leg, integrate_pv
from .ode import ode_solve
from .potential import (
    EquilibriumMeasure,
    ModifiedMeasure,
    PhiFunction,
    QuarticPotential,
    density_mu,
    density_mu_critical,
    density_vcirc,
    endpoints,
    eval_phi,
    eval_potential,
    euler_lagrange_residual,
    measure_mass,
)
from .contours import (
    ContourPath,
    TracedCurve,
    build_ray_contour,
    deformed_contour,
    conformal_f,
    conformal_ucirc,
    conformal_ut,
    region_sign_map,
    trace_phase_curve,
    trace_steepest,
)
from .orthopoly import (
    BilinearFormSpec,
    MomentTable,
    RecurrenceTable,
    compute_moments,
    freud_lattice,
    freud_residual,
    hankel_determinant_an,
    stieltjes_recurrence,
)
from .painleve import (
    PainleveParameters,
    PainleveSolution,
    eval_y_and_H,
    seed_state,
    series_coefficients,
    solve_painleve,
    stokes_multipliers,
)
from .verify import (
    ScalingExperiment,
    VerificationReport,
    absence_of_n15_term,
    run_critical,
    run_regular,
)

__version__ = "0.1.0"
