"""Moment engine, Stieltjes lattice, Hankel oracle, Freud equation."""

from fractions import Fraction

import pytest
from mpmath import exp, fabs, mp, mpc, mpf

from quartic_painleve.errors import DegenerateForm, LatticeBlowup
from quartic_painleve.orthopoly import (
    BilinearFormSpec,
    compute_moments,
    freud_lattice,
    freud_residual,
    hankel_determinant_an,
    stieltjes_recurrence,
    truncation_radius,
)
from quartic_painleve.precision import PrecisionContext

T_REG = Fraction(-1, 24)

# m_0 at t=-1/24, N=4, alpha=beta=1/2: regression constant frozen after
# validation against an independent composite-Simpson/Richardson oracle
# on the rays (agreement ~1e-79 at digits=80).
M0_REFERENCE = "1.26359615164512491219615710125603100007724261399615888540934624666669"


@pytest.fixture(scope="module")
def mom_half_N4(ctx60):
    spec = BilinearFormSpec(T_REG, 4, mpf(1) / 2, mpf(1) / 2)
    return compute_moments(spec, 10, ctx60)


def test_m0_regression_constant(ctx60, mom_half_N4):
    with ctx60.workdps():
        assert fabs(mom_half_N4.m[0] - mpf(M0_REFERENCE)) < mpf(10) ** -58
        assert fabs(mp.im(mom_half_N4.m[0])) < mpf(10) ** -55


def test_m0_simpson_oracle(ctx60):
    """Brute composite-Simpson on the ray confirms the leading digits."""
    with ctx60.workdps():
        t, N, R, n = mpf(-1) / 24, 4, mpf(8), 6000
        e = exp(mpc(0, 1) * mp.pi / 4)

        def f(r):
            z = e * r
            z2 = z * z
            return e * exp(-N * (z2 / 2 + t * z2 * z2 / 4))

        h = R / n
        s = f(mpf(0)) + f(R)
        for i in range(1, n):
            s += f(i * h) * (4 if i % 2 else 2)
        leg = s * h / 3
        m0_crude = 2 * mp.re(leg)  # alpha = beta = 1/2 collapses to 2 Re I+
        assert fabs(m0_crude - mpf(M0_REFERENCE)) < mpf("1e-8")


def test_odd_moments_vanish_for_even_form(ctx60, mom_half_N4):
    with ctx60.workdps():
        scale = mom_half_N4.scale()
        for k in (1, 3, 5, 7, 9):
            assert fabs(mom_half_N4.m[k]) < 100 * ctx60.quad_tol * scale


def test_moment_affinity_in_alpha_beta(ctx60):
    """m_k(alpha, beta) is affine: evaluating at three alphas checks linearity."""
    with ctx60.workdps():
        k_max = 6
        tables = {}
        for a in (mpf(0), mpf(1) / 2, mpf(1)):
            spec = BilinearFormSpec(T_REG, 4, a, mpf("0.3"))
            tables[a] = compute_moments(spec, k_max, ctx60).m
        for k in range(k_max + 1):
            mid = (tables[mpf(0)][k] + tables[mpf(1)][k]) / 2
            assert fabs(mid - tables[mpf(1) / 2][k]) < mpf(10) ** -50


def test_per_entry_error_estimates(ctx60, mom_half_N4):
    assert len(mom_half_N4.error_estimates) == mom_half_N4.k_max + 1
    assert max(mom_half_N4.error_estimates) < ctx60.quad_tol * 4


def test_truncation_radius_bound(ctx60):
    with ctx60.workdps():
        R = truncation_radius(T_REG, 4, 10, 60)
        # the weight times R^k is below the roundoff target at the radius
        val = fabs(R ** 10 * exp(4 * mpf(T_REG.numerator) / T_REG.denominator * R ** 4 / 4))
        assert val < mpf(10) ** -60


def test_first_stieltjes_step_closed_form(ctx60):
    with ctx60.workdps():
        spec = BilinearFormSpec(T_REG, 4, mpf("0.8"), mpf("0.1"))
        mom = compute_moments(spec, 6, ctx60)
        table = stieltjes_recurrence(mom, 2, ctx60)
        m0, m1, m2 = mom.m[0], mom.m[1], mom.m[2]
        assert fabs(table.b[0] - m1 / m0) < mpf(10) ** -50
        assert fabs(table.a[1] - (m2 / m0 - (m1 / m0) ** 2)) < mpf(10) ** -50


def test_bn_vanish_iff_symmetric(ctx60):
    with ctx60.workdps():
        mom = compute_moments(BilinearFormSpec(T_REG, 6, mpf(1) / 2, mpf(1) / 2), 14, ctx60)
        tab = stieltjes_recurrence(mom, 6, ctx60)
        assert max(fabs(b) for b in tab.b if b is not None) < 100 * ctx60.quad_tol
        mom2 = compute_moments(BilinearFormSpec(T_REG, 6, mpf("0.7"), mpf("0.3")), 14, ctx60)
        tab2 = stieltjes_recurrence(mom2, 6, ctx60)
        assert fabs(tab2.b[0]) > mpf(10) ** -30  # genuinely nonzero, if small


def test_freud_residual_of_pipeline(ctx60):
    with ctx60.workdps():
        mom = compute_moments(BilinearFormSpec(T_REG, 8, mpf(1) / 2, mpf(1) / 2), 20, ctx60)
        tab = stieltjes_recurrence(mom, 9, ctx60)
        assert freud_residual(tab, T_REG, 8) < mpf(10) ** -45


def test_freud_residual_detects_injected_defect(ctx60):
    """Hand-built table violating the relation by delta reports delta."""
    with ctx60.workdps():
        N, t = 4, mpf(0)
        a = [None] + [mpf(n) / N for n in range(1, 6)]
        tab = type("T", (), {})()
        tab.a = a
        tab.n_max = 5
        tab.freud_a = lambda n, a=a: mpc(0) if n == 0 else a[n]
        delta = mpf("1e-7")
        a[3] += delta
        res = freud_residual(tab, t, N)
        assert fabs(res - delta) < mpf(10) ** -20


def test_freud_t0_is_linear_lattice(ctx60):
    """At t=0 the string equation degenerates to a_n = n/N exactly."""
    with ctx60.workdps():
        N = 4
        a = [None] + [mpf(n) / N for n in range(1, 8)]
        tab = type("T", (), {})()
        tab.a = a
        tab.n_max = 7
        tab.freud_a = lambda n, a=a: mpc(0) if n == 0 else a[n]
        assert freud_residual(tab, 0, N) == 0


def test_t0_gaussian_moments_give_an_n_over_N(ctx60):
    """Hermite-like weight on the real line: a_n = n/N, b_n = 0.

    At t = 0 the ray contour diverges, so the form lives on the real
    axis; the moment route is checked by quadrature there.
    """
    from quartic_painleve.orthopoly import MomentTable
    from quartic_painleve.quadrature import integrate_real

    with ctx60.workdps():
        N = 4
        R = mpf(12)  # e^{-N R^2/2} ~ 1e-125
        m = []
        for k in range(12):
            v = integrate_real(lambda x, k=k: x ** k * exp(-N * x * x / 2), -R, R, ctx60)
            m.append(v)
        mom = MomentTable(m, [mpf(0)] * 12, 11, 0, N, mpf(1), mpf(1), ctx60.digits)
        tab = stieltjes_recurrence(mom, 4, ctx60)
        for n in range(1, 5):
            assert fabs(tab.a[n] - mpf(n) / N) < mpf(10) ** -50
            assert fabs(tab.b[n]) < mpf(10) ** -50


def test_hankel_oracle_matches_stieltjes(ctx60):
    with ctx60.workdps():
        mom = compute_moments(BilinearFormSpec(T_REG, 8, mpf("0.6"), mpf("0.4")), 20, ctx60)
        tab = stieltjes_recurrence(mom, 8, ctx60)
        han = hankel_determinant_an(mom, 8, ctx60)
        for n in range(1, 9):
            assert fabs(han[n] - tab.a[n]) / fabs(tab.a[n]) < mpf(10) ** -(ctx60.digits // 3)


def test_freud_lattice_cross_validation(ctx60):
    with ctx60.workdps():
        N = 8
        mom = compute_moments(BilinearFormSpec(T_REG, N, mpf(1) / 2, mpf(1) / 2), 22, ctx60)
        tab = stieltjes_recurrence(mom, 10, ctx60)
        lat, growth = freud_lattice(T_REG, N, tab.a[1], tab.a[2], 10, ctx60)
        for n in range(1, 10):
            assert fabs(lat[n] - tab.a[n]) < mpf(10) ** -(ctx60.digits // 2)
        assert growth[-1] > growth[2]  # instability is tracked


def test_freud_lattice_instability(ctx60):
    """Perturbing the seed grows the orbit separation monotonically."""
    with ctx60.workdps():
        N = 8
        mom = compute_moments(BilinearFormSpec(T_REG, N, mpf(1) / 2, mpf(1) / 2), 22, ctx60)
        tab = stieltjes_recurrence(mom, 10, ctx60)
        ref, _ = freud_lattice(T_REG, N, tab.a[1], tab.a[2], 10, ctx60)
        per, _ = freud_lattice(T_REG, N, tab.a[1] + mpf(10) ** -30, tab.a[2], 10, ctx60)
        seps = [fabs(r - p) for r, p in zip(ref[1:], per[1:])]
        assert all(b > a for a, b in zip(seps[1:], seps[2:]))
        assert seps[-1] > 10 * seps[1]


def test_freud_lattice_blowup(ctx60):
    with ctx60.workdps():
        with pytest.raises(LatticeBlowup):
            freud_lattice(T_REG, 4, mpf("0.2"), mpf(10) ** -58, 8, ctx60)


def test_degenerate_form_detected(ctx60):
    """alpha chosen to zero out m_0 makes pi_1 fail to exist (h_0 ~ 0)."""
    with ctx60.workdps():
        base = compute_moments(BilinearFormSpec(T_REG, 4, mpf(0), mpf("0.4")), 8, ctx60)
        bump = compute_moments(BilinearFormSpec(T_REG, 4, mpf(1), mpf("0.4")), 8, ctx60)
        # m_0(alpha) = m_0(0) + alpha * (m_0(1) - m_0(0)): solve for the root
        slope = bump.m[0] - base.m[0]
        alpha_star = -base.m[0] / slope
        mom = compute_moments(BilinearFormSpec(T_REG, 4, alpha_star, mpf("0.4")), 8, ctx60)
        tab = stieltjes_recurrence(mom, 3, ctx60)
        assert tab.exists[0] is True or tab.h[0] is not None
        assert not tab.exists[1]
        with pytest.raises(DegenerateForm):
            stieltjes_recurrence(mom, 3, ctx60, raise_on_degenerate=True)


def test_moments_on_deformed_contour_match_rays(ctx60):
    """Cauchy deformation invariance: ray moments equal deformed moments."""
    from quartic_painleve.contours import deformed_contour
    from quartic_painleve.orthopoly import moments_on_pieces

    t, N, k_max = T_REG, 6, 8
    alpha, beta = mpf("0.7"), mpf("0.3")
    ctx = PrecisionContext(60)
    with ctx.workdps():
        spec = BilinearFormSpec(t, N, alpha, beta)
        ray = compute_moments(spec, k_max, ctx)
        # stop radius where N Re V - k ln|z| clears (digits+15) ln 10
        contour = deformed_contour(alpha, beta, ctx, stop_radius=mpf("6.2"), arc_budget=14)
        assert [c.label for c in contour] == ["Gamma0", "Gamma1", "Gamma2", "Gamma3", "Gamma4"]
        deformed, errs = moments_on_pieces(contour, t, N, k_max, ctx)
        scale = ray.scale()
        for k in range(k_max + 1):
            assert fabs(ray.m[k] - deformed[k]) < 100 * ctx.quad_tol * scale
