"""Shared fixtures: precision contexts and cached expensive artifacts.

The heavyweight objects (high-precision moment tables, Painleve
trajectories, traced curves) are session-scoped so the acceptance module
and the unit tests share one computation.
"""

import pytest
from fractions import Fraction

from mpmath import mpf

from quartic_painleve.precision import PrecisionContext


@pytest.fixture(scope="session")
def ctx60():
    return PrecisionContext(60)


@pytest.fixture(scope="session")
def ctx60_loose():
    """digits=60 with quadrature tolerance suited to edge-singular densities."""
    return PrecisionContext(60, quad_tol=mpf(10) ** -32)


@pytest.fixture(scope="session")
def ctx120():
    return PrecisionContext(120)


@pytest.fixture(scope="session")
def freud_table_16(ctx120):
    """Criterion-1 workload: t=-1/24, alpha=beta=1/2, N=16, digits=120.

    Returns (moments, recurrence table to n=13).
    """
    from quartic_painleve.orthopoly import BilinearFormSpec, compute_moments, stieltjes_recurrence

    with ctx120.workdps():
        spec = BilinearFormSpec(Fraction(-1, 24), 16, mpf(1) / 2, mpf(1) / 2)
        mom = compute_moments(spec, 28, ctx120)
        table = stieltjes_recurrence(mom, 13, ctx120)
        return mom, table


@pytest.fixture(scope="session")
def painleve_half_criterion4():
    """y_(1/2) over [-30, -5] as overlapping re-anchored segments.

    The family's growing mode amplifies any error by
    exp(A[30^(5/4) - (-x)^(5/4)]) ~ 1e48 across the full interval, so a
    single sweep at ode_tol = 1e-22 leaves the solution long before -5.
    Re-seeding from the asymptotic series every few units keeps each
    segment on y_(1/2) to ~1e-7 while the local consistency that the
    Hamiltonian drift check measures stays at the 1e-22 step scale.
    ode_tol 1e-22 keeps 100*ode_tol = 1e-20 above the finite-difference
    floor of the drift check.
    """
    from quartic_painleve.painleve import PainleveParameters, solve_painleve_dense

    ctx = PrecisionContext(60, ode_tol=mpf(10) ** -22)
    spacing = mpf(1) / 200
    segments = []
    with ctx.workdps():
        spans = [(-30, -24.9), (-25, -19.9), (-20, -14.9), (-15, -9.9), (-12, -5)]
        for anchor, target in spans:
            params = PainleveParameters(mpf(1) / 2, x0=anchor)
            steps = int(round((target - anchor) / 0.005))
            grid = [mpf(anchor) + spacing * k for k in range(steps + 1)]
            # integrate exactly to the last grid point (the nominal target
            # is not representable at spacing 1/200)
            sol = solve_painleve_dense(params, grid[-1], ctx, sample_points=grid)
            segments.append((grid, sol))
    return ctx, spacing, segments


@pytest.fixture(scope="session")
def pole_run_half():
    """y_(1/2) integrated from -15 through the origin until blowup.

    Forward instability amplifies seed/solver errors by
    exp(A[15^(5/4) - (-x)^(5/4)]); ode_tol = 1e-30 keeps the trajectory
    on the true solution through the dip past x = 0, where the first
    pole sits (positive axis, as Joshi-Kitaev guarantee).
    """
    from quartic_painleve.painleve import PainleveParameters, solve_painleve_dense

    ctx = PrecisionContext(70, ode_tol=mpf(10) ** -30)
    sol = solve_painleve_dense(PainleveParameters(mpf(1) / 2, x0=-15), 10, ctx)
    return ctx, sol


@pytest.fixture(scope="session")
def traced_gamma1_120():
    """Criterion-7 workload: Gamma1 for phi_cr traced far out at digits=120."""
    from quartic_painleve.contours import trace_steepest
    from quartic_painleve.potential import PhiFunction

    ctx = PrecisionContext(120)
    curve = trace_steepest(1, PhiFunction("critical_cr"), ctx, arc_budget=130, stop_radius=90)
    return ctx, curve
