"""Integration contours: original rays, steepest-descent curves, lens
lips, sign rasters, and the local conformal data at the branch point.

The ray contour is two full lines through the origin at angles +-pi/4,
both parametrized by increasing r, carrying piecewise weights
(alpha, 1-beta, beta, 1-alpha) on (G1, G2, G3, G4) where G_j lives in
the j-th quadrant.  Deformed contours replace the rays by the interval
between the branch points plus the four steepest-descent curves.

Curve tracing: unit arc-length predictor along -conj(phi')/|phi'|
(descent; + for the lens lips) with a Newton projection back onto the
level set Im phi = level after every step.  phi along the curve is
updated incrementally with a fixed Gauss-Legendre rule on each step
segment, and audited against fresh quadrature evaluations of phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from mpmath import arg, conj, exp, fabs, mp, mpc, mpf, pi, power, sqrt

from .errors import DomainError, SingularStart, StallError
from .precision import PrecisionContext, to_mpf
from .potential import PhiFunction, endpoints, eval_phi
from .quadrature import PathPiece, QuadratureRule, gauss_legendre_nodes

RAY_LABELS = ("Gamma1", "Gamma2", "Gamma3", "Gamma4")
CONTOUR_LABELS = ("Gamma0",) + RAY_LABELS + ("lens_upper", "lens_lower")


@dataclass(frozen=True)
class ContourPath:
    """A labeled, ordered run of path pieces sharing one weight.

    Labels follow the contour decomposition: Gamma0 is the interval
    between the branch points (weight 1), Gamma1..Gamma4 the four
    quadrant legs, lens_upper/lens_lower the lens lips.
    """

    label: str
    pieces: tuple

    def __post_init__(self):
        if self.label not in CONTOUR_LABELS:
            raise ValueError(f"unknown contour label {self.label!r}")


@dataclass(frozen=True)
class RayLeg:
    """Half-line leg of the original contour, oriented by increasing r.

    r runs over (0, inf) for outgoing legs (G1, G4) and (-inf, 0) for
    incoming ones (G3, G2); ``angle`` is the angle of the carrying line,
    so points are r * exp(i*angle) with signed r.
    """

    label: str
    angle: object
    r_sign: int  # +1: r in (0, inf); -1: r in (-inf, 0)
    weight: object

    def point(self, r):
        return exp(mpc(0, 1) * to_mpf(self.angle)) * to_mpf(r)

    def truncated_piece(self, radius):
        """PathPiece over [0,1] traversing the leg with increasing r,
        truncated at |r| = radius."""
        R = to_mpf(radius)
        e = exp(mpc(0, 1) * to_mpf(self.angle))
        if self.r_sign > 0:
            return PathPiece(
                lambda u, e=e, R=R: e * (R * u),
                lambda u, e=e, R=R: e * R,
                self.weight,
                1,
            )
        return PathPiece(
            lambda u, e=e, R=R: e * (R * (u - 1)),
            lambda u, e=e, R=R: e * R,
            self.weight,
            1,
        )


def build_ray_contour(alpha, beta):
    """The four weighted ray legs of the bilinear form.

    Line 1 (angle pi/4) carries beta for r < 0 (G3) and alpha for r > 0
    (G1); line 2 (angle -pi/4) carries 1-beta for r < 0 (G2) and 1-alpha
    for r > 0 (G4).  Both lines are oriented by increasing r.
    """
    alpha = mpc(alpha)
    beta = mpc(beta)
    quarter = pi / 4
    return {
        "Gamma1": RayLeg("Gamma1", quarter, +1, alpha),
        "Gamma2": RayLeg("Gamma2", -quarter, -1, 1 - beta),
        "Gamma3": RayLeg("Gamma3", quarter, -1, beta),
        "Gamma4": RayLeg("Gamma4", -quarter, +1, 1 - alpha),
    }


# --------------------------------------------------------------------------
# curve tracing
# --------------------------------------------------------------------------


@dataclass
class TracedCurve:
    """Polyline on a level set of Im phi, anchored at a branch point."""

    label: str
    branch_point: object
    points: List[object] = field(default_factory=list)
    phi_values: List[object] = field(default_factory=list)
    arc: List[object] = field(default_factory=list)
    phase_level: object = None
    quality: object = None
    audited: int = 0

    def mirrored(self):
        """The point-reflected curve z -> -z (label unchanged)."""
        out = TracedCurve(
            self.label,
            -self.branch_point,
            [-z for z in self.points],
            list(self.phi_values),
            list(self.arc),
            self.phase_level,
            self.quality,
            self.audited,
        )
        return out


_DEPARTURE = {
    # quadrant -> (branch point sign, departure angle factor of pi)
    1: (+1, mpf(2) / 5),
    2: (-1, mpf(3) / 5),
    3: (-1, -mpf(3) / 5),
    4: (+1, -mpf(2) / 5),
}

_LIP_DEPARTURE = {+1: mpf(4) / 5, -1: -mpf(4) / 5}


def _phi_branch_points(phi: PhiFunction):
    if phi.variant == "regular":
        _, d = endpoints(phi.t)
        if d is None:
            raise DomainError("regular steepest tracing needs -1/12 < t < 0")
        return d
    return sqrt(mpf(8))


def _gl16_increment(phi, z0, z1, nodes):
    """Integral of phi' over the straight segment [z0, z1]."""
    d = z1 - z0
    s = mpc(0)
    for t, w in nodes:
        s += w * phi.derivative(z0 + d * t)
    return s * d


def _trace_level_curve(
    phi: PhiFunction,
    bp,
    theta0,
    direction,  # +1 ascend Re phi, -1 descend
    ctx: PrecisionContext,
    *,
    label,
    arc_budget,
    stop_radius,
    departure_eps=None,
    quality_target=None,
    audit_every=40,
    max_steps=20000,
):
    with ctx.workdps():
        bp = mpc(bp)
        eps = departure_eps if departure_eps is not None else mpf(10) ** (-(ctx.digits // 5))
        eps = mpf(eps)
        qtarget = quality_target if quality_target is not None else mpf(10) ** (-(ctx.digits // 4))
        qtarget = mpf(qtarget)
        nodes = gauss_legendre_nodes(16, mp.prec)

        z = bp + eps * exp(mpc(0, 1) * theta0)
        phi_z = eval_phi(phi, z, ctx)
        level = mp.im(phi_z)
        dphi = phi.derivative(z)
        if fabs(dphi) < mpf(10) ** (-2 * ctx.digits):
            raise SingularStart(f"phi' ~ 0 at the start point {z}")

        curve = TracedCurve(label, bp, [z], [phi_z], [mpf(0)], level)
        worst = mpf(0)
        h = eps / 2
        re_prev = mp.re(phi_z)
        arc_len = mpf(0)
        steps = 0
        while arc_len < arc_budget and fabs(z) < stop_radius and steps < max_steps:
            steps += 1
            dphi = phi.derivative(z)
            adphi = fabs(dphi)
            if adphi == 0:
                raise SingularStart(f"phi' vanished at {z} away from the branch point")
            tau = direction * conj(dphi) / adphi
            # local curvature bound keeps the predictor on the level set
            d2 = phi.second_derivative(z)
            kappa = fabs(d2) / adphi
            h_cap = mpf("0.25") / kappa if kappa > 0 else h * 2
            h = min(h * mpf("1.25"), h_cap, arc_budget - arc_len + eps)
            z_new = z + h * tau

            # Newton projection back onto Im phi = level; the normal
            # direction is i*tau, along which d(Im phi)/d(delta) = dir*|phi'|
            phi_new = curve.phi_values[-1] + _gl16_increment(phi, z, z_new, nodes)
            for _ in range(6):
                dphi_new = phi.derivative(z_new)
                if fabs(dphi_new) == 0:
                    raise SingularStart(f"phi' vanished at {z_new}")
                miss = mp.im(phi_new) - level
                if fabs(miss) < qtarget / 10:
                    break
                tau_new = direction * conj(dphi_new) / fabs(dphi_new)
                delta = -miss / (direction * fabs(dphi_new))
                correction = mpc(0, 1) * tau_new * delta
                phi_new = phi_new + _gl16_increment(phi, z_new, z_new + correction, nodes)
                z_new = z_new + correction

            re_new = mp.re(phi_new)
            if direction < 0 and re_new > re_prev + qtarget:
                raise StallError(f"Re phi increased from {re_prev} to {re_new} at {z_new}")
            if direction > 0 and re_new < re_prev - qtarget:
                raise StallError(f"Re phi decreased from {re_prev} to {re_new} at {z_new}")
            arc_len += fabs(z_new - z)
            z = z_new
            re_prev = re_new
            curve.points.append(z)
            curve.phi_values.append(phi_new)
            curve.arc.append(arc_len)
            if steps % audit_every == 0:
                fresh = eval_phi(phi, z, ctx)
                worst = max(worst, fabs(mp.im(fresh) - level))

        fresh = eval_phi(phi, z, ctx)
        worst = max(worst, fabs(mp.im(fresh) - level))
        curve.quality = worst
        curve.audited += 1 + steps // audit_every
        return curve


def trace_steepest(
    quadrant: int,
    phi: PhiFunction,
    ctx: PrecisionContext,
    arc_budget=12,
    stop_radius=40,
    **kwargs,
):
    """Steepest-descent curve of phi through the branch point in a quadrant.

    Starts a departure offset along the local power-law angle (2pi/5 family
    for the critical 5/2-exponent, vertical for the regular double zero)
    and advances by the unit descent field with level-set projection;
    Re phi decreases strictly along the output.
    """
    if quadrant not in (1, 2, 3, 4):
        raise DomainError(f"quadrant must be 1..4, got {quadrant}")
    sign, frac = _DEPARTURE[quadrant]
    with ctx.workdps():
        bp = _phi_branch_points(phi) * sign
        if phi.variant == "regular":
            theta = pi / 2 if quadrant in (1, 2) else -pi / 2
        else:
            theta = pi * frac
        return _trace_level_curve(
            phi,
            bp,
            theta,
            -1,
            ctx,
            label=f"Gamma{quadrant}",
            arc_budget=to_mpf(arc_budget),
            stop_radius=to_mpf(stop_radius),
            **kwargs,
        )


def trace_phase_curve(
    side: int,
    phi: PhiFunction,
    ctx: PrecisionContext,
    arc_budget=4,
    stop_radius=20,
    **kwargs,
):
    """Lens lip: the continuation of arg phi = +-2pi from the branch point.

    side +1 is the upper lip (departure angle 4pi/5), -1 the lower lip.
    Re phi increases strictly along the lip, starting from 0 at the
    branch point.
    """
    if side not in (+1, -1):
        raise DomainError("side must be +1 (upper lip) or -1 (lower lip)")
    with ctx.workdps():
        bp = _phi_branch_points(phi)
        theta = pi * _LIP_DEPARTURE[side]
        return _trace_level_curve(
            phi,
            bp,
            theta,
            +1,
            ctx,
            label="lens_upper" if side > 0 else "lens_lower",
            arc_budget=to_mpf(arc_budget),
            stop_radius=to_mpf(stop_radius),
            **kwargs,
        )


def deformed_contour(alpha, beta, ctx, *, phi=None, stop_radius=7, arc_budget=16, **trace_kw):
    """The deformed moment contour: Gamma0 plus four traced curves.

    Returns a list of ContourPath objects carrying the weights
    (1, alpha, 1-beta, beta, 1-alpha) on (Gamma0, G1..G4).  Each traced
    leg starts with the exact straight stub branch-point -> first traced
    point, and incoming legs (G2, G3) are traversed toward the branch
    point (orientation -1 on the outward-traced polyline).  By Cauchy's
    theorem, moments over this contour equal the ray-contour moments.
    """
    phi = phi or PhiFunction("critical_cr")
    with ctx.workdps():
        alpha, beta = mpc(alpha), mpc(beta)
        s8 = _phi_branch_points(phi)
        weights = {1: alpha, 2: 1 - beta, 3: beta, 4: 1 - alpha}
        signs = {1: 1, 2: -1, 3: -1, 4: 1}
        out = [ContourPath("Gamma0", (PathPiece.segment(-s8, s8, weight=1),))]
        for q in (1, 2, 3, 4):
            curve = trace_steepest(
                q, phi, ctx, arc_budget=arc_budget, stop_radius=stop_radius, **trace_kw
            )
            pts = [curve.branch_point] + curve.points
            pieces = tuple(
                PathPiece.segment(a, b, weight=weights[q], orientation=signs[q])
                for a, b in zip(pts, pts[1:])
            )
            out.append(ContourPath(f"Gamma{q}", pieces))
        return out


# --------------------------------------------------------------------------
# sign raster
# --------------------------------------------------------------------------


def region_sign_map(phi: PhiFunction, bbox, resolution, ctx, rule=None):
    """Signs of Re phi on a grid: +1, -1, or 0 for nodes on the cut.

    bbox = (re_min, re_max, im_min, im_max); resolution >= 16 nodes per
    axis.  Intended for SVG shading, so moderate precision contexts are
    appropriate.
    """
    if resolution < 16:
        raise DomainError("resolution must be >= 16 per axis")
    rule = rule or QuadratureRule(levels=10)
    re_min, re_max, im_min, im_max = (to_mpf(v) for v in bbox)
    with ctx.workdps():
        c = phi.endpoint
        band = (im_max - im_min) / (4 * resolution)
        rows = []
        for iy in range(resolution):
            y = im_min + (im_max - im_min) * iy / (resolution - 1)
            row = []
            for ix in range(resolution):
                x = re_min + (re_max - re_min) * ix / (resolution - 1)
                if fabs(y) <= band and x <= c:
                    row.append(0)
                    continue
                val = eval_phi(phi, mpc(x, y), ctx, rule)
                row.append(1 if mp.re(val) > 0 else -1)
            rows.append(row)
        return rows


# --------------------------------------------------------------------------
# conformal data at the branch point
# --------------------------------------------------------------------------


def _continued_power(value, z, bp, exponent, halfness):
    """value^exponent with the arg of value continued from (bp, inf).

    For z near the branch point, arg(value) tracks halfness * arg(z - bp)
    (halfness = 5/2 for phi_cr, 1/2 for phi_circ); the principal arg is
    unwound to the 2pi-branch closest to that model before the power is
    taken.
    """
    theta = arg(z - bp)
    a = arg(value)
    k = mp.nint((halfness * theta - a) / (2 * pi))
    mag = fabs(value)
    return power(mag, exponent) * exp(mpc(0, 1) * exponent * (a + 2 * pi * k))


def conformal_f(z, ctx, rule=None):
    """Conformal map f(z) = [ (5/4) phi_cr(z) ]^(2/5) near sqrt8.

    Branch positive for z - sqrt8 small positive; continued off the cut by
    unwinding arg(phi_cr) against the local (z - sqrt8)^(5/2) model.
    """
    with ctx.workdps():
        z = mpc(z)
        s8 = sqrt(mpf(8))
        if z == mpc(s8):
            return mpc(0)
        phi = PhiFunction("critical_cr")
        v = mpf(5) / 4 * eval_phi(phi, z, ctx, rule)
        return _continued_power(v, z, s8, mpf(2) / 5, mpf(5) / 2)


def conformal_ucirc(z, ctx, rule=None, richardson_h=None, richardson_n=8):
    """u_circ(z) = (4/5)^(1/5) phi_circ(z) / phi_cr(z)^(1/5).

    The apparent singularity at sqrt8 cancels between numerator and
    denominator; at z = sqrt8 the value is obtained by Richardson
    extrapolation of the quotient along shrinking real offsets.
    """
    with ctx.workdps():
        z = mpc(z)
        s8 = sqrt(mpf(8))
        if z == mpc(s8):
            h0 = richardson_h if richardson_h is not None else mpf(1) / 64
            samples = []
            h = mpf(h0)
            for _ in range(richardson_n):
                samples.append((h, conformal_ucirc(s8 + h, ctx, rule)))
                h = h / 2
            return _richardson_limit(samples)
        pref = power(mpf(4) / 5, mpf(1) / 5)
        num = eval_phi(PhiFunction("critical_circ"), z, ctx, rule)
        den = eval_phi(PhiFunction("critical_cr"), z, ctx, rule)
        root = _continued_power(den, z, s8, mpf(1) / 5, mpf(5) / 2)
        return pref * num / root


def conformal_ut(z, t, ctx, rule=None):
    """u_t(z) = (t + 1/12) u_circ(z), the Painleve argument scale."""
    with ctx.workdps():
        shift = PhiFunction("critical_t", t=t).shift()
        return shift * conformal_ucirc(z, ctx, rule)


def _richardson_limit(samples):
    """Neville extrapolation h -> 0 of (h, value) pairs (h halving)."""
    vals = [v for _, v in samples]
    hs = [h for h, _ in samples]
    n = len(vals)
    tab = list(vals)
    for m in range(1, n):
        new = []
        for i in range(n - m):
            a = tab[i + 1] + (tab[i + 1] - tab[i]) * hs[i + m] / (hs[i] - hs[i + m])
            new.append(a)
        tab = new
    return tab[0]


def f_derivative_at_branch(ctx, n_samples=10, h0=None, rule=None):
    """f'(sqrt8) by Richardson-extrapolated difference quotients f(s8+h)/h."""
    with ctx.workdps():
        s8 = sqrt(mpf(8))
        h = mpf(h0) if h0 is not None else mpf(1) / 32
        samples = []
        for _ in range(n_samples):
            samples.append((h, conformal_f(s8 + h, ctx, rule) / h))
            h = h / 2
        return _richardson_limit(samples)


def f_limit_ratio_at_branch(ctx, n_samples=10, h0=None, rule=None):
    """lim_(z->sqrt8) (z - sqrt8)/f(z) (equals the constant c3)."""
    with ctx.workdps():
        s8 = sqrt(mpf(8))
        h = mpf(h0) if h0 is not None else mpf(1) / 32
        samples = []
        for _ in range(n_samples):
            samples.append((h, h / conformal_f(s8 + h, ctx, rule)))
            h = h / 2
        return _richardson_limit(samples)
