"""Extended-precision quadrature: tanh-sinh, composite Gauss-Legendre,
and Cauchy principal values.

All rules integrate over parametrized path pieces (:class:`PathPiece`)
mapping [0, 1] into the complex plane.  Node sets are cached per
(precision, refinement level) and summed in a fixed order (center
outward, lower abscissa before upper), so results are bit-reproducible
for a given context.

Self-convergence is built in: a result is only accepted once two
successive refinements agree to within ``ctx.quad_tol`` relative error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from mpmath import cosh, exp, fabs, mp, mpc, mpf, pi, sinh

from .errors import NonConvergence, PoleOnBoundary
from .precision import PrecisionContext


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature policy for one integral.

    kind is 'tanh-sinh' (default; refinement doubles the node density) or
    'gauss-legendre-composite' (fixed degree per panel; refinement doubles
    the panel count).  ``levels`` bounds the refinement.  For semi-infinite
    legs the caller must truncate first; ``truncation_radius`` records the
    radius used so it lands in run manifests.
    """

    kind: str = "tanh-sinh"
    levels: int = 12
    nodes: int = 32  # GL degree per panel (composite rule only)
    truncation_radius: Optional[object] = None

    def __post_init__(self):
        if self.kind not in ("tanh-sinh", "gauss-legendre-composite"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.levels < 5:
            raise ValueError("levels must be >= 5")


@dataclass(frozen=True)
class PathPiece:
    """One parametrized piece of an integration contour.

    ``point(u)`` maps u in [0,1] to the plane and ``velocity(u)`` is its
    derivative; ``weight`` multiplies the piece's contribution and
    ``orientation`` (+1/-1) flips traversal without reparametrizing.
    """

    point: Callable
    velocity: Callable
    weight: object = 1
    orientation: int = 1

    @staticmethod
    def segment(a, b, weight=1, orientation=1):
        a, b = mpc(a), mpc(b)
        d = b - a
        return PathPiece(lambda u, a=a, d=d: a + d * u, lambda u, d=d: d, weight, orientation)

    @staticmethod
    def ray(angle, r_from, r_to, weight=1, orientation=1):
        """Straight piece r*exp(i*angle) for r in [r_from, r_to]."""
        e = exp(mpc(0, 1) * mpf(angle))
        r0, r1 = mpf(r_from), mpf(r_to)
        dr = r1 - r0
        return PathPiece(
            lambda u, e=e, r0=r0, dr=dr: e * (r0 + dr * u),
            lambda u, e=e, dr=dr: e * dr,
            weight,
            orientation,
        )


# --------------------------------------------------------------------------
# tanh-sinh nodes
# --------------------------------------------------------------------------

_TS_CACHE = {}


def ts_nodes(level, prec_bits):
    """Nested tanh-sinh nodes for [0,1] at 2^-level trapezoid spacing.

    Returns (center_weight, pairs); pairs is a list of (t_low, t_high, w)
    with t_low = 1 - t_high computed stably from the sigmoid form, ordered
    outward from the center.  Node sets nest: level L contains every node
    of level L-1 at even positions.
    """
    key = (level, prec_bits)
    if key in _TS_CACHE:
        return _TS_CACHE[key]
    with mp.workprec(prec_bits + 40):
        h = mpf(2) ** (-level)
        piq = pi / 4
        tiny = mpf(2) ** (-(prec_bits + 30))
        pairs = []
        k = 1
        while True:
            u = k * h
            s = 2 * piq * sinh(u)
            ch = cosh(s)
            w = h * piq * cosh(u) / (ch * ch)
            if w < tiny:
                break
            es = exp(-2 * s)
            t_low = es / (1 + es)  # (1 - tanh s)/2 without cancellation
            pairs.append((t_low, 1 - t_low, w))
            k += 1
        center_w = h * piq
    _TS_CACHE[key] = (center_w, pairs)
    return _TS_CACHE[key]


def _ts_level_sums(g, level, prec_bits):
    """Tanh-sinh sums (S_level, S_level-1) sharing one evaluation pass.

    The level-(L-1) estimate is twice the even-index partial sum, because
    halving the node density doubles the trapezoid spacing h.
    """
    center_w, pairs = ts_nodes(level, prec_bits)
    center = center_w * g(mpf(1) / 2)
    total = center
    even = center
    for idx, (t_lo, t_hi, w) in enumerate(pairs, start=1):
        contrib = w * (g(t_lo) + g(t_hi))
        total += contrib
        if idx % 2 == 0:
            even += contrib
    return total, 2 * even


def _integrate_ts(g, ctx, rule):
    """Adaptive tanh-sinh of g over [0,1] with nested refinement."""
    prec_bits = mp.prec
    err = mpf("inf")
    for level in range(5, rule.levels + 1):
        total, coarse = _ts_level_sums(g, level, prec_bits)
        err = fabs(total - coarse) / (1 + fabs(total))
        if err < ctx.quad_tol:
            return total, err
    raise NonConvergence(
        f"tanh-sinh did not reach quad_tol={ctx.quad_tol} by level {rule.levels}"
        f" (last error {err})",
        estimate=err,
    )


# --------------------------------------------------------------------------
# Gauss-Legendre nodes
# --------------------------------------------------------------------------

_GL_CACHE = {}


def gauss_legendre_nodes(degree, prec_bits):
    """Gauss-Legendre nodes/weights on [0,1], Newton-refined at prec+40."""
    key = (degree, prec_bits)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    with mp.workprec(prec_bits + 40):
        n = degree
        raw = []
        for k in range(1, n // 2 + 1):
            x = mp.cos(pi * (k - mpf(1) / 4) / (n + mpf(1) / 2))
            dp = mpf(1)
            for _ in range(200):
                p0, p1 = mpf(1), x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if fabs(dx) < mpf(2) ** (-(prec_bits + 20)):
                    break
            w = 2 / ((1 - x * x) * dp * dp)
            raw.append((x, w))
        out = []
        if n % 2 == 1:
            x = mpf(0)
            p0, p1 = mpf(1), x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            out.append((mpf(1) / 2, 1 / (dp * dp)))
        for x, w in raw:
            out.append(((1 - x) / 2, w / 2))
            out.append(((1 + x) / 2, w / 2))
        out.sort(key=lambda p: p[0])
    _GL_CACHE[key] = out
    return out


def _integrate_gl_composite(g, ctx, rule):
    prec_bits = mp.prec
    nodes = gauss_legendre_nodes(rule.nodes, prec_bits)
    panels = 1
    prev = None
    err = mpf("inf")
    for _ in range(rule.levels + 1):
        width = mpf(1) / panels
        total = mpc(0)
        for p in range(panels):
            a = p * width
            s = mpc(0)
            for t, w in nodes:
                s += w * g(a + width * t)
            total += s * width
        if prev is not None:
            err = fabs(total - prev) / (1 + fabs(total))
            if err < ctx.quad_tol:
                return total, err
        prev = total
        panels *= 2
    raise NonConvergence(
        f"composite GL did not reach quad_tol={ctx.quad_tol} with {panels // 2} panels",
        estimate=err,
    )


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------


def integrate_piece_with_error(f, piece: PathPiece, rule: QuadratureRule, ctx: PrecisionContext):
    """Integral of f along one path piece, with its convergence estimate."""

    def g(u):
        return f(piece.point(u)) * piece.velocity(u)

    with ctx.guarded():
        if rule.kind == "tanh-sinh":
            val, err = _integrate_ts(g, ctx, rule)
        else:
            val, err = _integrate_gl_composite(g, ctx, rule)
        val = val * piece.orientation * mpc(piece.weight)
    with ctx.workdps():
        return +val, +err


def integrate_leg(f, piece: PathPiece, rule: QuadratureRule, ctx: PrecisionContext):
    """Integral of an analytic integrand along one leg (path piece).

    Verified by level doubling; raises NonConvergence with the achieved
    estimate if two successive refinements disagree beyond quad_tol.
    """
    val, _ = integrate_piece_with_error(f, piece, rule, ctx)
    return val


def integrate_contour(f, pieces, rule, ctx):
    """Weighted sum of integrate_leg over an iterable of path pieces."""
    with ctx.workdps():
        total = mpc(0)
        for piece in pieces:
            total += integrate_leg(f, piece, rule, ctx)
        return total


def integrate_pv(f, a, b, x0, ctx, rule=None, excision=None):
    """Cauchy principal value of f over [a, b] with a simple pole at x0.

    f must have the form g(y)/(x0 - y) with g smooth at x0.  The interval
    is split as [a, x0-e] + [x0+e, b] plus the symmetric core integral of
    f(x0-u) + f(x0+u) over (0, e], in which the pole cancels exactly; the
    excision radius therefore only moves quadrature error around, and
    halving it changes the result by less than quad_tol.
    """
    rule = rule or QuadratureRule()
    with ctx.guarded():
        a, b, x0 = mpf(a), mpf(b), mpf(x0)
        if not (a < x0 < b):
            raise PoleOnBoundary(f"pole x0={x0} not strictly inside ({a}, {b})")
        gap = min(x0 - a, b - x0)
        e = mpf(excision) if excision is not None else gap / 4
        if not (0 < e < gap):
            raise PoleOnBoundary(f"excision {e} exceeds pole-endpoint gap {gap}")

        left, _ = integrate_piece_with_error(f, PathPiece.segment(a, x0 - e), rule, ctx)
        right, _ = integrate_piece_with_error(f, PathPiece.segment(x0 + e, b), rule, ctx)

        def core(u):
            return f(x0 - u) + f(x0 + u)

        # Gauss-Legendre keeps nodes away from u=0, where the pairwise
        # cancellation in f(x0-u) + f(x0+u) costs the most digits.
        core_rule = QuadratureRule("gauss-legendre-composite", levels=rule.levels, nodes=rule.nodes)
        mid, _ = integrate_piece_with_error(core, PathPiece.segment(mpf(0), e), core_rule, ctx)
        total = left + right + mid
    with ctx.workdps():
        return +mp.re(total)


def integrate_real(f, a, b, ctx, rule=None):
    """Convenience wrapper for a straight real interval; returns mpc."""
    rule = rule or QuadratureRule()
    val, _ = integrate_piece_with_error(f, PathPiece.segment(mpf(a), mpf(b)), rule, ctx)
    return val
