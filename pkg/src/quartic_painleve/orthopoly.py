"""Moments of the complex bilinear form, Stieltjes recurrence extraction,
Hankel-determinant oracle, and the Freud lattice.

The bilinear form is

    <p, q> = alpha Int_G1 + (1-beta) Int_G2 + beta Int_G3 + (1-alpha) Int_G4

of p(z) q(z) e^{-N V_t(z)} dz over the ray contour (or a deformed contour
through the branch points; by analyticity both give the same moments).

Moment integrals share quadrature nodes across all powers k: the weight
e^{-N V_t(z)} is evaluated once per node and the powers are accumulated
by repeated multiplication, which makes full moment tables roughly as
cheap as a single integral.  Per-leg integrals are independent of
(alpha, beta) and cached, so rerunning with different contour weights is
free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from mpmath import exp, fabs, log, mp, mpc, mpf

from .errors import DegenerateForm, LatticeBlowup, NonConvergence
from .precision import as_exact, to_mpf
from .contours import RAY_LABELS, build_ray_contour
from .quadrature import QuadratureRule, gauss_legendre_nodes, ts_nodes


@dataclass(frozen=True)
class BilinearFormSpec:
    """Parameters (t, N, alpha, beta) of the bilinear form plus quadrature policy."""

    t: object
    N: int
    alpha: object
    beta: object
    rule: QuadratureRule = field(default_factory=QuadratureRule)

    def leg_weights(self):
        a, b = mpc(self.alpha), mpc(self.beta)
        return {"Gamma1": a, "Gamma2": 1 - b, "Gamma3": b, "Gamma4": 1 - a}


@dataclass
class MomentTable:
    """Moments m_k = <z^k, 1> with per-entry self-convergence estimates."""

    m: List[object]
    error_estimates: List[object]
    k_max: int
    t: object = None
    N: int = 0
    alpha: object = None
    beta: object = None
    digits: int = 0

    def scale(self):
        return max(fabs(v) for v in self.m)


def truncation_radius(t, N, k_max, digits):
    """Radius R with weight bound e^{-N|t|R^4/4} R^k below 10^-(digits+10).

    Derived from Re(t z^4/4) on the rays arg z = +-pi/4; a short fixed
    point iteration absorbs the polynomial factor R^k_max.
    """
    tm = fabs(to_mpf(as_exact(t)))
    if tm == 0:
        raise ValueError("truncation radius needs t < 0 (quartic decay on the rays)")
    target = (digits + 15) * log(mpf(10))
    R = (4 * target / (N * tm)) ** mpf("0.25")
    for _ in range(8):
        R = (4 * (target + k_max * log(R + 2)) / (N * tm)) ** mpf("0.25")
    return R


def _power_sums_ts(piece, t_m, N, k_max, level, prec_bits):
    """Tanh-sinh moment sums for one leg at one level.

    Returns (sums, coarse) where sums[k] ~ Int z^k e^{-N V} dz at this
    level and coarse is the embedded level-(L-1) estimate.
    """
    center_w, pairs = ts_nodes(level, prec_bits)
    K = k_max
    sums = [mpc(0)] * (K + 1)
    even = [mpc(0)] * (K + 1)
    quarter = N * t_m / 4
    half = mpf(N) / 2

    def accumulate(tt, w, into_even):
        z = piece.point(tt)
        dz = piece.velocity(tt)
        z2 = z * z
        wt = w * dz * exp(-(half * z2 + quarter * z2 * z2))
        p = wt
        sums[0] += p
        if into_even:
            even[0] += p
        for k in range(1, K + 1):
            p = p * z
            sums[k] += p
            if into_even:
                even[k] += p

    accumulate(mpf(1) / 2, center_w, True)
    for idx, (t_lo, t_hi, w) in enumerate(pairs, start=1):
        into_even = idx % 2 == 0
        accumulate(t_lo, w, into_even)
        accumulate(t_hi, w, into_even)
    coarse = [2 * v for v in even]
    return sums, coarse


_LEG_CACHE = {}
_LEG_CACHE_LIMIT = 64


def _cache_key(t, N, k_max, leg, digits, rule):
    t_key = str(as_exact(t)) if isinstance(as_exact(t), Fraction) else mp.nstr(to_mpf(t), digits)
    return (t_key, N, k_max, leg.label, digits, rule.kind, rule.levels)


def leg_moment_integrals(leg, t, N, k_max, ctx, rule=None):
    """Unweighted integrals Int_leg z^k e^{-N V_t} dz for k = 0..k_max.

    Adaptive tanh-sinh with the same nested certificate as integrate_leg,
    applied to all k simultaneously (acceptance requires every entry to
    self-converge).  Results are cached per (t, N, k_max, leg, digits).
    """
    rule = rule or QuadratureRule()
    key = _cache_key(t, N, k_max, leg, ctx.digits, rule)
    if key in _LEG_CACHE:
        return _LEG_CACHE[key]
    with ctx.guarded():
        t_m = to_mpf(as_exact(t))
        radius = rule.truncation_radius or truncation_radius(t, N, k_max, ctx.digits)
        piece = leg.truncated_piece(radius)
        err = [mpf("inf")] * (k_max + 1)
        result = None
        for level in range(6, rule.levels + 1):
            sums, coarse = _power_sums_ts(piece, t_m, N, k_max, level, mp.prec)
            err = [
                fabs(s - c) / (1 + fabs(s)) for s, c in zip(sums, coarse)
            ]
            if max(err) < ctx.quad_tol:
                result = sums
                break
        if result is None:
            raise NonConvergence(
                f"moment integrals on {leg.label} not converged at level {rule.levels}"
                f" (worst relative change {max(err)})",
                estimate=max(err),
            )
    with ctx.workdps():
        out = ([+v for v in result], [+e for e in err], radius)
    if len(_LEG_CACHE) >= _LEG_CACHE_LIMIT:
        _LEG_CACHE.pop(next(iter(_LEG_CACHE)))
    _LEG_CACHE[key] = out
    return out


def compute_moments(spec: BilinearFormSpec, k_max, ctx) -> MomentTable:
    """Moment table m_k = sum over legs of weight * Int z^k e^{-N V_t} dz."""
    legs = build_ray_contour(spec.alpha, spec.beta)
    weights = spec.leg_weights()
    with ctx.workdps():
        m = [mpc(0)] * (k_max + 1)
        err = [mpf(0)] * (k_max + 1)
        for label in RAY_LABELS:
            vals, errs, _ = leg_moment_integrals(legs[label], spec.t, spec.N, k_max, ctx, spec.rule)
            w = weights[label]
            for k in range(k_max + 1):
                m[k] += w * vals[k]
                err[k] += fabs(w) * errs[k]
        return MomentTable(
            m, err, k_max, spec.t, spec.N, mpc(spec.alpha), mpc(spec.beta), ctx.digits
        )


def moments_on_pieces(pieces, t, N, k_max, ctx, degree=None):
    """Moments over an explicit contour given as weighted path pieces.

    Accepts a flat iterable of PathPiece or of labeled ContourPath runs
    (flattened in order).  Each piece is integrated with composite
    Gauss-Legendre panels sized by the local logarithmic derivative of
    z^k e^{-N V}; the certificate is a second pass at a higher degree.
    Used for the Cauchy deformation invariance check against the rays.
    """
    flat = []
    for item in pieces:
        flat.extend(item.pieces) if hasattr(item, "pieces") else flat.append(item)
    pieces = flat
    with ctx.guarded():
        t_m = to_mpf(as_exact(t))
        deg = degree or max(48, (ctx.digits * 2) // 3)
        out = None
        prev = None
        for d in (deg, deg + 16):
            nodes = gauss_legendre_nodes(d, mp.prec)
            sums = [mpc(0)] * (k_max + 1)
            for piece in pieces:
                w_piece = mpc(piece.weight) * piece.orientation
                # bound the integrand's log-derivative on the piece to size panels
                za, zb = piece.point(mpf(0)), piece.point(mpf(1))
                zmax = max(fabs(za), fabs(zb), mpf(1))
                lam = N * (zmax + fabs(t_m) * zmax ** 3) + k_max / max(min(fabs(za), fabs(zb)), mpf("0.1"))
                seg_len = fabs(zb - za)
                panels = max(1, int(mp.ceil(lam * seg_len)))
                width = mpf(1) / panels
                for p in range(panels):
                    base = p * width
                    for tt, w in nodes:
                        u = base + width * tt
                        z = piece.point(u)
                        dz = piece.velocity(u) * width
                        z2 = z * z
                        wt = w_piece * w * dz * exp(-N * (z2 / 2 + t_m * z2 * z2 / 4))
                        p_acc = wt
                        sums[0] += p_acc
                        for k in range(1, k_max + 1):
                            p_acc = p_acc * z
                            sums[k] += p_acc
            prev, out = out, sums
        errs = [fabs(a - b) / (1 + fabs(a)) for a, b in zip(out, prev)]
    with ctx.workdps():
        return [+v for v in out], [+e for e in errs]


# --------------------------------------------------------------------------
# recurrence extraction
# --------------------------------------------------------------------------


@dataclass
class RecurrenceTable:
    """Recurrence data a_n, b_n, squared norms h_n, existence flags.

    a[n] is defined for n >= 1 (a[0] is None by the pi_{-1} = 0 convention),
    b[n] and h[n] for n >= 0.  exists[n] is True iff h_0..h_{n-1} all clear
    the degeneracy threshold, i.e. the monic pi_n is well defined.
    """

    a: List[object]
    b: List[object]
    h: List[object]
    exists: List[bool]
    n_max: int
    threshold: object = None

    def freud_a(self, n):
        if n == 0:
            return mpc(0)
        v = self.a[n]
        if v is None:
            raise DegenerateForm(n)
        return v


def stieltjes_recurrence(moments: MomentTable, n_max, ctx, raise_on_degenerate=False):
    """Moment-based Gram-Schmidt lattice for monic orthogonal polynomials.

    Maintains coefficient vectors of pi_n; h_n = <pi_n, pi_n>,
    b_n = <z pi_n, pi_n>/h_n, a_n = h_n/h_{n-1}.  Stops early (flagging
    exists=False) when |h_n| falls below 10^(-digits/2) * max|m_k|:
    non-Hermitian orthogonality can genuinely degenerate, and the
    threshold separates that from roundoff.
    """
    if moments.k_max < 2 * n_max + 2:
        raise ValueError(
            f"need moments to degree {2 * n_max + 2} for n_max={n_max}, have {moments.k_max}"
        )
    with ctx.workdps():
        mv = moments.m
        threshold = mpf(10) ** (-(ctx.digits // 2)) * moments.scale()
        a = [None] * (n_max + 1)
        b = [None] * (n_max + 1)
        h = [None] * (n_max + 1)
        exists = [True] * (n_max + 2)
        pi_prev = None  # coefficients of pi_{n-1}
        pi_cur = [mpc(1)]  # pi_0
        stopped_at = None
        for n in range(n_max + 1):
            s = [mpc(0)] * (len(pi_cur) + 1)
            for i in range(len(pi_cur) + 1):
                acc = mpc(0)
                for j, cj in enumerate(pi_cur):
                    acc += cj * mv[i + j]
                s[i] = acc
            h_n = mpc(0)
            for i, ci in enumerate(pi_cur):
                h_n += ci * s[i]
            zb = mpc(0)
            for i, ci in enumerate(pi_cur):
                zb += ci * s[i + 1]
            h[n] = h_n
            if fabs(h_n) < threshold:
                stopped_at = n
                for k in range(n + 1, n_max + 2):
                    exists[k] = False
                if raise_on_degenerate:
                    raise DegenerateForm(n)
                break
            b[n] = zb / h_n
            if n >= 1:
                a[n] = h_n / h[n - 1]
            if n < n_max:
                # pi_{n+1} = (z - b_n) pi_n - a_n pi_{n-1}
                nxt = [mpc(0)] * (len(pi_cur) + 1)
                for i, ci in enumerate(pi_cur):
                    nxt[i + 1] += ci
                    nxt[i] -= b[n] * ci
                if n >= 1:
                    for i, ci in enumerate(pi_prev):
                        nxt[i] -= a[n] * ci
                pi_prev, pi_cur = pi_cur, nxt
        return RecurrenceTable(a, b, h, exists[: n_max + 2], n_max, threshold)


def hankel_determinant_an(moments: MomentTable, n_max, ctx):
    """Small-n oracle: a_n = D_{n+1} D_{n-1} / D_n^2 from Hankel determinants.

    Factorial-cost route retained only as an independent check of the
    Gram-Schmidt lattice for n <= ~8.
    """
    with ctx.workdps():
        dets = [mpf(1)]  # D_0 = 1
        for n in range(1, n_max + 3):
            if moments.k_max < 2 * (n - 1):
                break
            dets.append(_det([[moments.m[i + j] for j in range(n)] for i in range(n)]))
        out = [None] * (n_max + 1)
        for n in range(1, n_max + 1):
            if n + 1 < len(dets) and dets[n] != 0:
                out[n] = dets[n + 1] * dets[n - 1] / (dets[n] * dets[n])
        return out


def _det(rows):
    """LU determinant with partial pivoting (complex entries)."""
    n = len(rows)
    m = [list(r) for r in rows]
    det = mpc(1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: fabs(m[r][col]))
        if fabs(m[piv][col]) == 0:
            return mpc(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] * inv
            if factor != 0:
                for cc in range(col, n):
                    m[r][cc] -= factor * m[col][cc]
    return det


# --------------------------------------------------------------------------
# Freud / string equation
# --------------------------------------------------------------------------


def freud_residual(table: RecurrenceTable, t, N):
    """max_n | a_n + t a_n (a_{n-1} + a_n + a_{n+1}) - n/N | with a_0 = 0.

    Caller asserts alpha = beta (the relation only holds for the even
    form).  Runs over every n with all three neighbors defined.
    """
    t_m = to_mpf(as_exact(t))
    worst = mpf(0)
    n = 1
    while n + 1 <= table.n_max and table.a[n + 1] is not None:
        a_prev = table.freud_a(n - 1)
        a_n = table.freud_a(n)
        a_next = table.freud_a(n + 1)
        r = a_n + t_m * a_n * (a_prev + a_n + a_next) - mpf(n) / N
        worst = max(worst, fabs(r))
        n += 1
    return worst


def freud_lattice(t, N, a1_seed, a2_seed, n_max, ctx):
    """Forward iteration a_{n+1} = n/(N t a_n) - 1/t - a_{n-1} - a_n.

    The lattice is the unstable direction of the string equation, so
    precision loss is expected; a per-step condition estimate (growth of
    the local Jacobian product) is returned alongside the sequence.
    Raises LatticeBlowup on division by a near-zero a_n.
    """
    with ctx.workdps():
        t_m = to_mpf(as_exact(t))
        tiny = mpf(10) ** (-(ctx.digits - 5))
        a = [mpc(0), mpc(a1_seed), mpc(a2_seed)]
        growth = [mpf(1), mpf(1), mpf(1)]
        for n in range(2, n_max):
            a_n = a[n]
            if fabs(a_n) < tiny:
                raise LatticeBlowup(n)
            nxt = mpf(n) / (N * t_m * a_n) - 1 / t_m - a[n - 1] - a_n
            # condition of the map wrt (a_n, a_{n-1})
            j_n = fabs(-mpf(n) / (N * t_m * a_n * a_n) - 1)
            growth.append(growth[-1] * max(j_n, mpf(1)) + growth[-2])
            a.append(nxt)
        return a[: n_max + 1], growth[: n_max + 1]
