"""Acceptance suite: the eight primary criteria at their stated tolerances.

Each test prints one pass/fail line.  Shared session fixtures keep the
expensive artifacts (high-precision moment tables, Painleve runs, traced
curves) to a single computation.
"""

import random
from fractions import Fraction

import pytest
from mpmath import arg, fabs, mp, mpc, mpf, pi, power, sqrt

from quartic_painleve.constants import c2, c3, check_constant_identities
from quartic_painleve.contours import (
    conformal_ucirc,
    deformed_contour,
    f_derivative_at_branch,
    f_limit_ratio_at_branch,
)
from quartic_painleve.orthopoly import (
    BilinearFormSpec,
    compute_moments,
    freud_lattice,
    freud_residual,
    hankel_determinant_an,
    moments_on_pieces,
)
from quartic_painleve.painleve import (
    PainleveParameters,
    optimal_series_order,
    series_value,
    solve_painleve,
    stokes_relation_residuals,
)
from quartic_painleve.potential import (
    ModifiedMeasure,
    euler_lagrange_residual,
    pv_vcirc,
    vcirc_total_mass,
)
from quartic_painleve.precision import PrecisionContext
from quartic_painleve.verify import (
    ScalingExperiment,
    run_critical,
    run_regular,
    within_factor_of_median,
)


def _report(criterion, ok, detail):
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


# ---------------------------------------------------------------------------
# criterion 1: Freud-equation residual
# ---------------------------------------------------------------------------


def test_criterion_1_freud_residual(ctx120, freud_table_16):
    """t=-1/24, alpha=beta=1/2, N=n=16, digits=120: residual < 1e-60."""
    mom, table = freud_table_16
    with ctx120.workdps():
        assert all(table.a[n] is not None for n in range(1, 14))
        res = freud_residual(table, Fraction(-1, 24), 16)
        ok = res < mpf(10) ** -60
    assert _report(1, ok, f"max Freud residual over a_1..a_12 = {mp.nstr(res, 5)} < 1e-60")


# ---------------------------------------------------------------------------
# criterion 2: Theorem 1 regular limit
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def regular_reports():
    n_list = (8, 12, 16, 24)
    sym = run_regular(
        ScalingExperiment("regular", mpf(1) / 2, mpf(1) / 2, n_list=n_list, t=Fraction(-1, 24))
    )
    asym = run_regular(
        ScalingExperiment("regular", mpf("0.7"), mpf("0.3"), n_list=n_list, t=Fraction(-1, 24))
    )
    return sym, asym


def test_criterion_2_regular_scaled_residuals(regular_reports):
    sym, _ = regular_reports
    with mp.workdps(sym.digits):
        scaled = [r.scaled_residual_a for r in sym.records]
        ok = within_factor_of_median(scaled, mpf("2.5"))
    assert _report(
        2, ok, "n*|a_nn - L| in " + str([mp.nstr(s, 4) for s in scaled]) + " within 2.5x of median"
    )


def test_criterion_2_regular_b_symmetric(regular_reports):
    sym, _ = regular_reports
    with mp.workdps(sym.digits):
        worst = max(r.residual_b for r in sym.records)
        ok = worst < mpf(10) ** -30
    assert _report(2, ok, f"alpha=beta: max |b_nn| = {mp.nstr(worst, 4)} < 1e-30")


def test_criterion_2_regular_b_exponential(regular_reports):
    _, asym = regular_reports
    fit = asym.extras["log_b_fit"]
    ok = asym.passes["b_exponentially_small"] and fit["slope"] < 0
    assert _report(
        2, ok, f"alpha=0.7,beta=0.3: log|b_nn| slope {fit['slope']:.3f} < 0 (affine decrease)"
    )


# ---------------------------------------------------------------------------
# criterion 3: Theorem 2 critical scaling
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def critical_reports():
    n_list = (16, 32, 64)
    ctx = PrecisionContext(240, quad_tol=mpf(10) ** -190)
    sym = run_critical(
        ScalingExperiment("critical", mpf(1) / 2, mpf(1) / 2, n_list=n_list, x=-5, digits=240),
        ctx,
    )
    asym = run_critical(
        ScalingExperiment("critical", mpf("0.8"), mpf("0.2"), n_list=n_list, x=-5, digits=240),
        ctx,
    )
    return sym, asym


def test_criterion_3_critical_a_scaling(critical_reports):
    sym, _ = critical_reports
    with mp.workdps(60):
        scaled = [r.scaled_residual_a for r in sym.records]
        ok = within_factor_of_median(scaled, mpf(2))
    assert _report(
        3,
        ok,
        "n^(3/5)|a_nn - 2 + 2 c2 y n^(-2/5)| in "
        + str([mp.nstr(s, 4) for s in scaled])
        + " within 2x of median",
    )


def test_criterion_3_critical_b_symmetric_zero(critical_reports):
    sym, _ = critical_reports
    with mp.workdps(60):
        worst = max(fabs(mpc(r.b_nn)) for r in sym.records)
        ok = worst < mpf(10) ** -30
    assert _report(3, ok, f"alpha=beta: max |b_nn| = {mp.nstr(worst, 4)} < 1e-30")


def test_criterion_3_critical_b_asymmetric(critical_reports):
    _, asym = critical_reports
    with mp.workdps(60):
        scaled = [r.scaled_residual_b for r in asym.records]
        ok = within_factor_of_median(scaled, mpf(2))
    assert _report(
        3,
        ok,
        "alpha=0.8,beta=0.2: n^(3/5)|b_nn - c3(y_b - y_a) n^(-2/5)| in "
        + str([mp.nstr(s, 4) for s in scaled])
        + " within 2x of median",
    )


def test_criterion_3_cross_oracle_recorded(critical_reports):
    sym, _ = critical_reports
    ok = sym.passes.get("freud_lattice_cross_oracle", False)
    assert _report(3, ok, "Freud-lattice recomputation agrees with Stieltjes on overlap")


# ---------------------------------------------------------------------------
# criterion 4: Painleve solver self-consistency
# ---------------------------------------------------------------------------


def test_criterion_4_hamiltonian_drift(painleve_half_criterion4):
    """max |H' + y| via order-10 finite differences < 100 * ode_tol.

    The overlapping segments jointly cover [-30, -5]; differentiation
    stays inside each segment (H carries a ~1e-7 re-anchoring offset
    between segments, while the within-segment drift is at step scale).
    """
    ctx, h, segments = painleve_half_criterion4
    with ctx.workdps():
        # 11-point order-10 central first-derivative weights
        w = [mpf(5) / 6, -mpf(5) / 21, mpf(5) / 84, -mpf(5) / 504, mpf(1) / 1260]
        worst = mpf(0)
        covered_low = None
        covered_high = None
        for grid, sol in segments:
            idx = {x: i for i, x in enumerate(sol.grid)}
            order = [idx[x] for x in grid]
            H = [sol.H[i] for i in order]
            y = [sol.y[i] for i in order]
            for j in range(5, len(grid) - 5):
                d = sum(w[k - 1] * (H[j + k] - H[j - k]) for k in range(1, 6)) / h
                worst = max(worst, fabs(d + y[j]))
            lo, hi = grid[5], grid[-6]
            if covered_low is None:
                covered_low, covered_high = lo, hi
            else:
                assert lo <= covered_high  # overlap: no gap in coverage
                covered_high = max(covered_high, hi)
        assert covered_low <= mpf(-30) + 6 * h and covered_high >= mpf(-5) - 6 * h
        ok = worst < 100 * ctx.ode_tol
    assert _report(4, ok, f"max |H' + y| on [-30,-5] = {mp.nstr(worst, 4)} < 1e-20")


def test_criterion_4_series_vs_ode():
    """ODE from x0=-30 matches the direct series at x=-20 within 1e-10."""
    ctx = PrecisionContext(70, ode_tol=mpf(10) ** -36)
    with ctx.workdps():
        params = PainleveParameters(mpf(1) / 2, x0=-30)
        sol = solve_painleve(params, -20, ctx, samples=[mpf(-20)])
        s, _, _, _ = series_value(-20, optimal_series_order(-20), ctx)
        diff = fabs(sol.value_at(mpf(-20)) - s)
        ok = diff < mpf(10) ** -10
    assert _report(4, ok, f"|y_ode(-20) - y_series(-20)| = {mp.nstr(diff, 4)} < 1e-10")


def test_criterion_4_stokes_relation():
    rng = random.Random(77)
    with mp.workdps(60):
        worst = mpf(0)
        for _ in range(20):
            alpha = mpc(rng.uniform(-4, 4), rng.uniform(-4, 4))
            for r in stokes_relation_residuals(alpha):
                worst = max(worst, fabs(r))
        ok = worst == 0
    assert _report(4, ok, "1 + s_k s_(k+1) = -i s_(k+3) exactly for 20 random alpha")


def test_criterion_4_positive_pole(pole_run_half):
    ctx, sol = pole_run_half
    with ctx.workdps():
        ok = bool(sol.poles) and sol.poles[0] > 0
        where = mp.nstr(sol.poles[0], 8) if sol.poles else "none"
    assert _report(4, ok, f"y_(1/2) first detected pole at x = {where} > 0")


# ---------------------------------------------------------------------------
# criterion 5: modified equilibrium identities
# ---------------------------------------------------------------------------


def test_criterion_5_vcirc_mass(ctx60):
    with ctx60.workdps():
        v = fabs(vcirc_total_mass(ctx60))
        ok = v < mpf(10) ** -40
    assert _report(5, ok, f"|Int v_circ| = {mp.nstr(v, 4)} < 1e-40 at digits=60")


def test_criterion_5_pv_equation(ctx60):
    with ctx60.workdps():
        worst = mpf(0)
        for x in (mpf(-2), mpf("0.5"), mpf(1), mpf(2)):
            worst = max(worst, fabs(pv_vcirc(x, ctx60) - x ** 3 / 2))
        ok = worst < mpf(10) ** -30
    assert _report(5, ok, f"max |PV Int v_circ/(x-y) - x^3/2| = {mp.nstr(worst, 4)} < 1e-30")


def test_criterion_5_euler_lagrange(ctx60_loose):
    res, l_est, _ = euler_lagrange_residual(
        ModifiedMeasure(Fraction(-1, 12)), Fraction(-1, 12), [0, 1, 2], ctx60_loose
    )
    ok = res < mpf(10) ** -25
    assert _report(
        5, ok, f"Euler-Lagrange residual {mp.nstr(res, 4)} < 1e-25 (l_t = {mp.nstr(l_est, 10)})"
    )


# ---------------------------------------------------------------------------
# criterion 6: conformal-data identities
# ---------------------------------------------------------------------------


def test_criterion_6_conformal_identities(ctx120):
    with ctx120.workdps():
        fp = f_derivative_at_branch(ctx120)
        err_fp = fabs(fp - power(mpf(2), -mpf(1) / 10) * power(mpf(3), -mpf(2) / 5))
        u0 = conformal_ucirc(sqrt(mpf(8)), ctx120)
        err_u = fabs(u0 + power(mpf(2), mpf(9) / 5) * power(mpf(3), mpf(6) / 5))
        ratio = f_limit_ratio_at_branch(ctx120)
        err_r = fabs(ratio - c3())
        ok = err_fp < mpf(10) ** -20 and err_u < mpf(10) ** -15 and err_r < mpf(10) ** -15
    assert _report(
        6,
        ok,
        f"|f'(s8) - 2^(-1/10)3^(-2/5)| = {mp.nstr(err_fp, 3)} < 1e-20, "
        f"|u(s8) + 2^(9/5)3^(6/5)| = {mp.nstr(err_u, 3)} < 1e-15, "
        f"|lim (z-s8)/f - c3| = {mp.nstr(err_r, 3)} < 1e-15",
    )


# ---------------------------------------------------------------------------
# criterion 7: contour geometry
# ---------------------------------------------------------------------------


def test_criterion_7_traced_gamma1(traced_gamma1_120):
    ctx, curve = traced_gamma1_120
    with ctx.workdps():
        s8 = sqrt(mpf(8))
        im_ok = curve.quality < mpf(10) ** -25 and fabs(curve.phase_level) < mpf(10) ** -25
        dep = None
        for z in curve.points:
            if fabs(z - s8) >= mpf("1e-6"):
                dep = fabs(arg(z - s8) - 2 * pi / 5)
                break
        asy = fabs(arg(curve.points[-1]) - pi / 4)
        ok = im_ok and dep < mpf("1e-3") and asy < mpf("1e-3")
    assert _report(
        7,
        ok,
        f"|Im phi| <= {mp.nstr(curve.quality, 3)} < 1e-25, departure angle err "
        f"{mp.nstr(dep, 3)} < 1e-3, asymptote err {mp.nstr(asy, 3)} < 1e-3 at |z|="
        f"{mp.nstr(fabs(curve.points[-1]), 4)}",
    )


def test_criterion_7_deformation_invariance(ctx60):
    """Ray-contour moments equal deformed-contour moments (Cauchy)."""
    t, n_weight, k_max = Fraction(-1, 24), 6, 8
    alpha, beta = mpf("0.7"), mpf("0.3")
    with ctx60.workdps():
        spec = BilinearFormSpec(t, n_weight, alpha, beta)
        ray = compute_moments(spec, k_max, ctx60)
        contour = deformed_contour(alpha, beta, ctx60, stop_radius=mpf("6.2"), arc_budget=14)
        deformed, _ = moments_on_pieces(contour, t, n_weight, k_max, ctx60)
        scale = ray.scale()
        worst = max(fabs(ray.m[k] - deformed[k]) for k in range(k_max + 1))
        ok = worst < 100 * ctx60.quad_tol * scale
    assert _report(
        7, ok, f"max |m_k(rays) - m_k(deformed)| = {mp.nstr(worst, 4)} < 100*quad_tol*scale"
    )


# ---------------------------------------------------------------------------
# criterion 8: pipeline equivalence oracles
# ---------------------------------------------------------------------------


def test_criterion_8_hankel_oracle(ctx120, freud_table_16):
    mom, table = freud_table_16
    with ctx120.workdps():
        han = hankel_determinant_an(mom, 8, ctx120)
        worst = max(
            fabs(han[n] - table.a[n]) / fabs(table.a[n]) for n in range(1, 9)
        )
        ok = worst < mpf(10) ** -40
    assert _report(8, ok, f"Stieltjes vs Hankel a_n relative diff {mp.nstr(worst, 4)} < 1e-40")


def test_criterion_8_freud_lattice_overlap(ctx120, freud_table_16):
    mom, table = freud_table_16
    with ctx120.workdps():
        lat, _ = freud_lattice(Fraction(-1, 24), 16, table.a[1], table.a[2], 13, ctx120)
        worst = max(fabs(lat[n] - table.a[n]) for n in range(1, 13))
        ok = worst < mpf(10) ** -(ctx120.digits // 2)
    assert _report(8, ok, f"Stieltjes vs Freud lattice diff {mp.nstr(worst, 4)} < 1e-60")


def test_constants_identity_on_startup():
    assert check_constant_identities()
    with mp.workdps(60):
        assert fabs(c2() - sqrt(mpf(2)) * c3()) < mpf(10) ** -58
