"""Quartic potential, equilibrium measures, and the phi-functions.

Closed forms implemented here:

* potential  V_t(x) = x^2/2 + t x^4/4
* endpoints  c_t^2 = (2/3t)(sqrt(1+12t) - 1),  d_t^2 = -(1/3t)(sqrt(1+12t) + 2)
* density    mu_t'(x) = (t/2pi)(x^2 - d_t^2) sqrt(c_t^2 - x^2) on [-c_t, c_t]
* critical   mu_cr'(x) = (8 - x^2)^(3/2) / 24pi on [-sqrt8, sqrt8]
* signed     v_circ(x) = (8 + 4x^2 - x^4) / (2pi sqrt(8 - x^2))

phi-functions are contour integrals from the right endpoint, evaluated by
quadrature along a straight (or two-segment) cut-avoiding path.  The
substitution s = c + sigma^2 (z - c) removes the branch-point factor
exactly, so the integrands handed to the quadrature are analytic.

Exact rational parameters (Fraction / '-1/12' strings) are kept exact
through the discriminant 1 + 12t, so critical-point runs are not
contaminated by binary rounding of 1/12.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from mpmath import fabs, log, mp, mpc, mpf, pi, sqrt

from .errors import BranchCutError, DomainError
from .precision import PrecisionContext, as_exact, to_mpf
from .quadrature import PathPiece, QuadratureRule, integrate_piece_with_error, integrate_real

T_CRITICAL = Fraction(-1, 12)


@dataclass(frozen=True)
class QuarticPotential:
    """Varying quartic external field with weight e^{-N V_t(z)}.

    t may be a Fraction (kept exact) or any mpf-convertible value.
    Regular-case use requires -1/12 < t < 0; the critical machinery
    accepts any t in a neighborhood of -1/12.
    """

    t: object
    N: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N}")

    def t_mpf(self):
        return to_mpf(self.t)

    def is_regular_range(self):
        te = as_exact(self.t)
        if isinstance(te, Fraction):
            return T_CRITICAL < te < 0
        return mpf(-1) / 12 < te < 0


def eval_potential(pot, z):
    """V_t(z) = z^2/2 + t z^4/4 at context precision."""
    t = pot.t_mpf() if isinstance(pot, QuarticPotential) else to_mpf(pot)
    z = mpc(z)
    z2 = z * z
    return z2 / 2 + t * z2 * z2 / 4


def discriminant_root(t):
    """sqrt(1 + 12t), exact zero at the critical point for exact input."""
    te = as_exact(t)
    if isinstance(te, Fraction):
        disc = 1 + 12 * te
        if disc < 0:
            raise DomainError(f"t={t} below critical value -1/12: c_t not real")
        return sqrt(to_mpf(disc))
    disc = 1 + 12 * mpf(te)
    if disc < 0:
        raise DomainError(f"t={t} below critical value -1/12: c_t not real")
    return sqrt(disc)


def endpoints(t):
    """Support endpoint c_t and density-zero parameter d_t (positive roots).

    At t = 0 the closed forms degenerate; the analytic limit c_0 = 2 is
    returned and d is flagged undefined (None), since d_t^2 < 0 for t > 0.
    Raises DomainError for t < -1/12.
    """
    te = as_exact(t)
    if isinstance(te, Fraction) and te == 0:
        return mpf(2), None
    tm = to_mpf(te)
    if tm == 0:
        return mpf(2), None
    root = discriminant_root(te)
    c2 = 2 * (root - 1) / (3 * tm)
    d2 = -(root + 2) / (3 * tm)
    if c2 < 0:
        raise DomainError(f"c_t^2 = {c2} < 0 at t={t}")
    c = sqrt(c2)
    d = sqrt(d2) if d2 > 0 else None
    return c, d


def density_mu(t, x):
    """Equilibrium density (t/2pi)(x^2 - d_t^2) sqrt(c_t^2 - x^2).

    Valid for -1/12 <= t < 0 (at the critical point this is identically
    the closed form (8 - x^2)^(3/2)/24pi).  DomainError outside [-c, c].
    """
    te = as_exact(t)
    tm = to_mpf(te)
    if isinstance(te, Fraction):
        if not (T_CRITICAL <= te < 0):
            raise DomainError(f"density_mu requires -1/12 <= t < 0, got {t}")
    elif not (mpf(-1) / 12 <= tm < 0):
        raise DomainError(f"density_mu requires -1/12 <= t < 0, got {t}")
    c, d = endpoints(te)
    x = to_mpf(x)
    if fabs(x) > c:
        raise DomainError(f"x={x} outside support [-{c}, {c}]")
    c2 = c * c
    d2 = d * d
    return tm / (2 * pi) * (x * x - d2) * sqrt((c - x) * (c + x))


def density_mu_critical(x):
    """Critical density (8 - x^2)^(3/2) / 24pi on [-sqrt8, sqrt8]."""
    x = to_mpf(x)
    s8 = sqrt(mpf(8))
    if fabs(x) > s8:
        raise DomainError(f"x={x} outside support [-sqrt8, sqrt8]")
    return (8 - x * x) ** mpf("1.5") / (24 * pi)


def density_vcirc(x):
    """Signed correction density (8 + 4x^2 - x^4) / (2pi sqrt(8 - x^2)).

    Zero total mass; negative near the endpoints.  DomainError at |x| >= sqrt8.
    """
    x = to_mpf(x)
    s8 = sqrt(mpf(8))
    if fabs(x) >= s8:
        raise DomainError(f"x={x} not strictly inside (-sqrt8, sqrt8)")
    x2 = x * x
    return (8 + 4 * x2 - x2 * x2) / (2 * pi * sqrt((s8 - x) * (s8 + x)))


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Probability measure with density density_mu on [-c_t, c_t].

    Stores only the exact parameter; endpoints are computed at the active
    working precision on each access, so a measure constructed at one
    precision stays valid under any context.
    """

    t: object

    @staticmethod
    def for_t(t):
        _, d = endpoints(as_exact(t))
        if d is None:
            raise DomainError("equilibrium measure needs -1/12 <= t < 0")
        return EquilibriumMeasure(as_exact(t))

    @property
    def c_t(self):
        return endpoints(self.t)[0]

    @property
    def d_t(self):
        return endpoints(self.t)[1]

    def density(self, x):
        return density_mu(self.t, x)

    @property
    def support(self):
        c = self.c_t
        return (-c, c)


@dataclass(frozen=True)
class ModifiedMeasure:
    """Signed measure v_cr + (t + 1/12) v_circ pinned to [-sqrt8, sqrt8]."""

    t: object

    def density(self, x):
        te = as_exact(self.t)
        if isinstance(te, Fraction):
            shift = to_mpf(te - T_CRITICAL)
        else:
            shift = to_mpf(te) + mpf(1) / 12
        base = density_mu_critical(x)
        if shift == 0:
            return base
        return base + shift * density_vcirc(x)

    @property
    def support(self):
        s8 = sqrt(mpf(8))
        return (-s8, s8)


def measure_mass(measure, ctx, rule=None):
    """Total mass of a measure by quadrature.

    For the two standard measures the substitution y = c*sin(theta) makes
    the integrand analytic (the cos factor cancels the edge singularity
    exactly), avoiding the half-precision floor a hard endpoint would
    cost.  Other measures fall back to direct clipped quadrature.
    """
    with ctx.workdps():
        half_pi = pi / 2
        if isinstance(measure, EquilibriumMeasure):
            t_m = to_mpf(as_exact(measure.t))
            c, d = measure.c_t, measure.d_t
            d2 = d * d

            def g(theta):
                y = c * mp.sin(theta)
                co = c * mp.cos(theta)
                return t_m / (2 * pi) * (y * y - d2) * co * co

            val = integrate_real(g, -half_pi, half_pi, ctx, rule)
            return mp.re(val)
        if isinstance(measure, ModifiedMeasure):
            te = as_exact(measure.t)
            if isinstance(te, Fraction):
                shift = to_mpf(te - T_CRITICAL)
            else:
                shift = to_mpf(te) + mpf(1) / 12
            s8 = sqrt(mpf(8))

            def g(theta):
                y = s8 * mp.sin(theta)
                co = mp.cos(theta)
                y2 = y * y
                # v_cr: (8 cos^2)^{3/2} * s8 cos / 24pi = (8/3pi) cos^4 ... kept explicit
                base = 8 * sqrt(mpf(8)) * co ** 4 / (24 * pi) * s8
                corr = (8 + 4 * y2 - y2 * y2) / (2 * pi)
                return base + shift * corr

            val = integrate_real(g, -half_pi, half_pi, ctx, rule)
            return mp.re(val)
        a, b = measure.support
        val = integrate_real(lambda y: density_or_zero(measure, y), a, b, ctx, rule)
        return mp.re(val)


def vcirc_total_mass(ctx, rule=None):
    """Int of v_circ over its support via y = sqrt8 sin(theta) (exactly zero
    in the math; returns the numerically achieved value)."""
    with ctx.workdps():
        half_pi = pi / 2
        s8 = sqrt(mpf(8))

        def g(theta):
            y = s8 * mp.sin(theta)
            y2 = y * y
            return (8 + 4 * y2 - y2 * y2) / (2 * pi)

        return mp.re(integrate_real(g, -half_pi, half_pi, ctx, rule))


def pv_vcirc(x, ctx, rule=None):
    """PV Int v_circ(y)/(x - y) dy over (-sqrt8, sqrt8) (equals x^3/2).

    Substituting y = sqrt8 sin(theta) removes the edge singularity of
    v_circ analytically; the principal value is then taken in theta,
    where the pole stays simple and the symmetric-core cancellation of
    integrate_pv applies unchanged.
    """
    from .quadrature import integrate_pv  # local import to avoid cycle noise

    with ctx.guarded():
        x = to_mpf(x)
        s8 = sqrt(mpf(8))
        if fabs(x) >= s8:
            raise DomainError(f"x={x} not strictly inside (-sqrt8, sqrt8)")
        half_pi = pi / 2
        theta0 = mp.asin(x / s8)

        def f(theta):
            theta = to_mpf(theta)
            y = s8 * mp.sin(theta)
            y2 = y * y
            return (8 + 4 * y2 - y2 * y2) / (2 * pi * (x - y))

        val = integrate_pv(f, -half_pi, half_pi, theta0, ctx, rule)
    with ctx.workdps():
        return +val


# --------------------------------------------------------------------------
# phi-functions
# --------------------------------------------------------------------------

_PHI_VARIANTS = ("regular", "critical_cr", "critical_circ", "critical_t")


@dataclass(frozen=True)
class PhiFunction:
    """One of the phi contour integrals from the right branch point.

    variant:
      regular       -(t/2) * Int_c^z (s^2 - d^2) sqrt(s^2 - c^2) ds
      critical_cr   (1/24) * Int_sqrt8^z (s^2 - 8)^(3/2) ds
      critical_circ (1/2)  * Int_sqrt8^z (8 + 4s^2 - s^4)/sqrt(s^2 - 8) ds
      critical_t    critical_cr + (t + 1/12) * critical_circ

    Branch convention: sqrt(s^2 - c^2) = sqrt(s-c)*sqrt(s+c) with principal
    square roots, positive for real s > c, continuous off the cut [-c, c];
    phi itself is defined on C minus (-infinity, c].
    """

    variant: str
    t: object = None

    def __post_init__(self):
        if self.variant not in _PHI_VARIANTS:
            raise ValueError(f"unknown phi variant {self.variant!r}")
        if self.variant in ("regular", "critical_t") and self.t is None:
            raise ValueError(f"variant {self.variant!r} requires t")

    @property
    def endpoint(self):
        if self.variant == "regular":
            c, _ = endpoints(as_exact(self.t))
            return c
        return sqrt(mpf(8))

    def shift(self):
        """t + 1/12, exact when t is exact."""
        te = as_exact(self.t)
        if isinstance(te, Fraction):
            return to_mpf(te - T_CRITICAL)
        return to_mpf(te) + mpf(1) / 12

    def derivative(self, z):
        """phi'(z) in closed form (no quadrature)."""
        z = mpc(z)
        if self.variant == "regular":
            c, d = endpoints(as_exact(self.t))
            w = sqrt(z - c) * sqrt(z + c)
            return -to_mpf(as_exact(self.t)) / 2 * (z * z - d * d) * w
        s8 = sqrt(mpf(8))
        w = sqrt(z - s8) * sqrt(z + s8)
        if self.variant == "critical_cr":
            return w ** 3 / 24
        if self.variant == "critical_circ":
            z2 = z * z
            return (8 + 4 * z2 - z2 * z2) / (2 * w)
        return (
            PhiFunction("critical_cr").derivative(z)
            + self.shift() * PhiFunction("critical_circ").derivative(z)
        )

    def second_derivative(self, z):
        """phi''(z) in closed form, used for tracer step-size control."""
        z = mpc(z)
        if self.variant == "regular":
            tm = to_mpf(as_exact(self.t))
            c, d = endpoints(as_exact(self.t))
            w = sqrt(z - c) * sqrt(z + c)
            return -tm / 2 * (2 * z * w + (z * z - d * d) * z / w)
        s8 = sqrt(mpf(8))
        w = sqrt(z - s8) * sqrt(z + s8)
        if self.variant == "critical_cr":
            return z * w / 8
        if self.variant == "critical_circ":
            z2 = z * z
            p = 8 + 4 * z2 - z2 * z2
            return (8 * z - 4 * z * z2) / (2 * w) - p * z / (2 * w ** 3)
        return (
            PhiFunction("critical_cr").second_derivative(z)
            + self.shift() * PhiFunction("critical_circ").second_derivative(z)
        )


def _on_cut(z, c, tol):
    return fabs(mp.im(z)) <= tol and mp.re(z) <= c + tol


def _segment_crosses_cut(p, q, c):
    """True if the straight segment [p, q] crosses (-infinity, c]."""
    ip, iq = mp.im(p), mp.im(q)
    if ip == 0 and iq == 0:
        return min(mp.re(p), mp.re(q)) <= c
    if ip * iq > 0:
        return False
    if ip == iq:  # both zero handled above
        return False
    tau = -ip / (iq - ip)
    if tau < 0 or tau > 1:
        return False
    x_cross = mp.re(p) + tau * (mp.re(q) - mp.re(p))
    return x_cross <= c


def _sigma_integrand(phi: PhiFunction, target):
    """Integrand over sigma in [0,1] for the leg branch-point -> target,
    desingularized by the substitution s = c + sigma^2 (target - c)."""
    c = phi.endpoint
    xi = sqrt(mpc(target) - c)  # principal; sigma*xi is then principal sqrt(s - c)

    if phi.variant == "critical_cr":

        def g(sigma):
            s = c + (sigma * xi) ** 2
            return sigma ** 4 * xi ** 5 * sqrt(s + c) ** 3 / 12

    elif phi.variant == "critical_circ":

        def g(sigma):
            s = c + (sigma * xi) ** 2
            s2 = s * s
            return xi * (8 + 4 * s2 - s2 * s2) / sqrt(s + c)

    elif phi.variant == "regular":
        tm = to_mpf(as_exact(phi.t))
        _, d = endpoints(as_exact(phi.t))
        d2 = d * d

        def g(sigma):
            s = c + (sigma * xi) ** 2
            return -tm * sigma ** 2 * xi ** 3 * (s * s - d2) * sqrt(s + c)

    else:  # critical_t handled compositionally in eval_phi
        raise ValueError("critical_t has no single sigma integrand")

    return g


def eval_phi(phi: PhiFunction, z, ctx: PrecisionContext, rule=None, via=None):
    """phi(z) by quadrature from the endpoint along a cut-avoiding path.

    The path is the straight segment endpoint -> z, or endpoint -> via -> z
    when ``via`` is given (used by the path-independence checks).  Raises
    BranchCutError if z lies on the cut or a requested segment crosses it.

    Accuracy note: the lower limit is the rounded endpoint, which costs
    ~digits/2 correct digits on the critical_circ variant (integrable
    inverse-sqrt singularity); all other variants are full precision.
    """
    rule = rule or QuadratureRule()
    if phi.variant == "critical_t":
        base = eval_phi(PhiFunction("critical_cr"), z, ctx, rule, via)
        corr = eval_phi(PhiFunction("critical_circ", t=phi.t), z, ctx, rule, via)
        with ctx.workdps():
            return base + phi.shift() * corr

    with ctx.guarded():
        z = mpc(z)
        c = phi.endpoint
        # the caller's endpoint may differ from the guarded-precision one
        # by an ulp at context precision; snap such points to the endpoint
        if fabs(z - c) <= mpf(10) ** (-ctx.digits) * (1 + fabs(c)):
            return mpc(0)
        cut_tol = mpf(10) ** (-(ctx.digits + 10))
        if _on_cut(z, c, cut_tol):
            raise BranchCutError(f"z={z} lies on the cut (-inf, {c}]")

        first_target = mpc(via) if via is not None else z
        # the sigma leg's image is the straight segment [c, first_target];
        # it only meets the cut when the target itself sits on the cut side
        if mp.im(first_target) == 0 and mp.re(first_target) < c:
            raise BranchCutError(f"segment to {first_target} runs along the cut")
        g = _sigma_integrand(phi, first_target)
        val = integrate_real(g, mpf(0), mpf(1), ctx, rule)

        if via is not None:
            p, q = mpc(via), z
            if _segment_crosses_cut(p, q, c):
                raise BranchCutError(f"segment {p} -> {q} crosses the cut")
            seg = PathPiece.segment(p, q)
            tail, _ = integrate_piece_with_error(lambda s: phi.derivative(s), seg, rule, ctx)
            val = val + tail
    with ctx.workdps():
        return +val


def phi_cr_closed_form(z):
    """Closed-form phi_cr for cross-checks, valid off the cut.

    (1/24)[ z w^3/4 - 3 z w ] + log(z + w) - log(sqrt8),
    w = sqrt(z - sqrt8) sqrt(z + sqrt8).  The principal log is correct
    whenever z + w stays off the negative real axis (right half plane and
    nearby), which covers the test points used against the quadrature.
    """
    z = mpc(z)
    s8 = sqrt(mpf(8))
    w = sqrt(z - s8) * sqrt(z + s8)
    return (z * w ** 3 / 4 - 3 * z * w) / 24 + log(z + w) - log(s8)


def density_or_zero(measure, y):
    # rounding can push the deepest quadrature nodes a few ulp past the
    # support edge, where the density formula leaves its domain; those
    # nodes carry doubly-exponentially small weight
    try:
        return measure.density(y)
    except DomainError:
        return mpf(0)


def euler_lagrange_residual(measure, t, probe_points, ctx, rule=None):
    """Constancy check of E(x) = 2 Int log|x-y| dnu(y) - V_t(x) inside the support.

    The log singularity is split at y = x and removed by y = x -+ u^2 on
    each side.  Returns (residual, l_estimate, values) where residual is
    the max pairwise deviation over probes and l_estimate their mean (the
    numerical Lagrange constant; the math provides no closed form for it).
    """
    rule = rule or QuadratureRule()
    values = []
    with ctx.guarded():
        a, b = measure.support
        tm = to_mpf(as_exact(t))
        for x in probe_points:
            x = to_mpf(x)
            if not (a < x < b):
                raise DomainError(f"probe {x} not strictly inside the support")
            ul = sqrt(x - a)
            ur = sqrt(b - x)

            def left(u):
                return 4 * u * log(u) * density_or_zero(measure, x - u * u)

            def right(u):
                return 4 * u * log(u) * density_or_zero(measure, x + u * u)

            li = integrate_real(left, mpf(0), ul, ctx, rule)
            ri = integrate_real(right, mpf(0), ur, ctx, rule)
            v_x = x * x / 2 + tm * x ** 4 / 4
            values.append(2 * (mp.re(li) + mp.re(ri)) - v_x)
        if len(values) > 1:
            residual = max(
                fabs(vi - vj) for i, vi in enumerate(values) for vj in values[i + 1 :]
            )
        else:
            residual = mpf(0)
        l_est = sum(values) / len(values)
    with ctx.workdps():
        return +residual, +l_est, [+v for v in values]
