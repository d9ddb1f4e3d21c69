"""Adaptive embedded Runge-Kutta integration at extended precision.

The stepper is the 13-stage Fehlberg 7(8) pair.  Its Butcher tableau is
exactly rational, so the method keeps its formal order at any working
precision (decimal-truncated tableaus would cap accuracy near 1e-20).
The 8th-order solution is propagated; the 7th-order embedded value
drives step control.

Integration can run in either x direction, records every accepted step,
lands exactly on requested sample points, and halts with a Blowup event
once the state norm exceeds a configurable ceiling (Painleve I poles are
double poles, so the state explodes sharply and the event localizes the
pole approach).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as F
from typing import Callable, List, Optional, Sequence

from mpmath import fabs, mp, mpc, mpf

from .errors import StepUnderflow
from .precision import PrecisionContext

# Fehlberg RKF7(8) tableau (exact rationals).
_C = [
    F(0), F(2, 27), F(1, 9), F(1, 6), F(5, 12), F(1, 2), F(5, 6), F(1, 6),
    F(2, 3), F(1, 3), F(1), F(0), F(1),
]

_A = [
    [],
    [F(2, 27)],
    [F(1, 36), F(1, 12)],
    [F(1, 24), F(0), F(1, 8)],
    [F(5, 12), F(0), F(-25, 16), F(25, 16)],
    [F(1, 20), F(0), F(0), F(1, 4), F(1, 5)],
    [F(-25, 108), F(0), F(0), F(125, 108), F(-65, 27), F(125, 54)],
    [F(31, 300), F(0), F(0), F(0), F(61, 225), F(-2, 9), F(13, 900)],
    [F(2), F(0), F(0), F(-53, 6), F(704, 45), F(-107, 9), F(67, 90), F(3)],
    [F(-91, 108), F(0), F(0), F(23, 108), F(-976, 135), F(311, 54), F(-19, 60),
     F(17, 6), F(-1, 12)],
    [F(2383, 4100), F(0), F(0), F(-341, 164), F(4496, 1025), F(-301, 82),
     F(2133, 4100), F(45, 82), F(45, 164), F(18, 41)],
    [F(3, 205), F(0), F(0), F(0), F(0), F(-6, 41), F(-3, 205), F(-3, 41),
     F(3, 41), F(6, 41), F(0)],
    [F(-1777, 4100), F(0), F(0), F(-341, 164), F(4496, 1025), F(-289, 82),
     F(2193, 4100), F(51, 82), F(33, 164), F(12, 41), F(0), F(1)],
]

_B7 = [F(41, 840), F(0), F(0), F(0), F(0), F(34, 105), F(9, 35), F(9, 35),
       F(9, 280), F(9, 280), F(41, 840), F(0), F(0)]

_B8 = [F(0), F(0), F(0), F(0), F(0), F(34, 105), F(9, 35), F(9, 35),
       F(9, 280), F(9, 280), F(0), F(41, 840), F(41, 840)]


def tableau_row_sums_consistent():
    """Exact consistency check sum_j a_ij == c_i and sum b == 1."""
    for i, row in enumerate(_A):
        if sum(row, F(0)) != _C[i]:
            return False
    return sum(_B7, F(0)) == F(1) and sum(_B8, F(0)) == F(1)


_COEFF_CACHE = {}


def _mp_tableau(prec_bits):
    """Tableau converted to mpf at the working precision (cached)."""
    if prec_bits in _COEFF_CACHE:
        return _COEFF_CACHE[prec_bits]
    with mp.workprec(prec_bits + 20):
        A = [[mpf(x.numerator) / x.denominator for x in row] for row in _A]
        B8 = [mpf(x.numerator) / x.denominator for x in _B8]
        C = [mpf(x.numerator) / x.denominator for x in _C]
        # error weights b8 - b7
        E = [mpf((b8 - b7).numerator) / (b8 - b7).denominator if (b8 - b7) != 0 else mpf(0)
             for b7, b8 in zip(_B7, _B8)]
    _COEFF_CACHE[prec_bits] = (A, B8, C, E)
    return _COEFF_CACHE[prec_bits]


@dataclass
class BlowupEvent:
    """State norm crossed the ceiling; x_approach is the last good x."""

    x_approach: object
    state: tuple
    norm: object


@dataclass
class Trajectory:
    """Dense record of an adaptive solve: every accepted step plus events."""

    xs: List[object] = field(default_factory=list)
    states: List[tuple] = field(default_factory=list)
    events: List[BlowupEvent] = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0
    status: str = "ok"  # ok | blowup

    def state_at(self, x):
        """State at a grid point hit exactly during the solve."""
        for xi, yi in zip(self.xs, self.states):
            if xi == x:
                return yi
        raise KeyError(f"x={x} was not a step endpoint of this trajectory")


def _norm(state):
    return max(fabs(c) for c in state)


def rk4_fixed(rhs, x_start, x_end, y_start, steps, ctx):
    """Classical fixed-step RK4: an independent low-tech oracle."""
    with ctx.workdps():
        x = mpf(x_start)
        h = (mpf(x_end) - x) / steps
        y = tuple(mpc(v) for v in y_start)
        for _ in range(steps):
            k1 = rhs(x, y)
            k2 = rhs(x + h / 2, tuple(yi + h / 2 * ki for yi, ki in zip(y, k1)))
            k3 = rhs(x + h / 2, tuple(yi + h / 2 * ki for yi, ki in zip(y, k2)))
            k4 = rhs(x + h, tuple(yi + h * ki for yi, ki in zip(y, k3)))
            y = tuple(
                yi + h / 6 * (a + 2 * b + 2 * c + d)
                for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
            )
            x = x + h
        return y


def ode_solve(
    rhs: Callable,
    x_start,
    x_end,
    y_start: Sequence,
    ctx: PrecisionContext,
    *,
    sample_points: Optional[Sequence] = None,
    blowup_ceiling=1e8,
    max_steps: int = 2_000_000,
    first_step=None,
    fixed_step=None,
) -> Trajectory:
    """Integrate y' = rhs(x, y) from x_start to x_end adaptively.

    rhs maps (x, state tuple) -> tuple of mpc derivatives.  sample_points
    inside the range are hit exactly (steps are clipped, never
    interpolated).  On blowup the trajectory stops and records the
    approach point; StepUnderflow is raised if the step collapses below
    10^(-digits/2) without the ceiling being crossed.

    fixed_step disables the error controller and marches at constant
    step (still clipped to targets); used for order checks, where halving
    the step must shrink the endpoint error by 2^8.
    """
    with ctx.workdps():
        x0, x1 = mpf(x_start), mpf(x_end)
        tol = ctx.ode_tol
        A, B8, C, E = _mp_tableau(mp.prec)
        direction = 1 if x1 >= x0 else -1
        span = fabs(x1 - x0)
        traj = Trajectory()
        y = tuple(mpc(v) for v in y_start)
        x = x0
        traj.xs.append(x)
        traj.states.append(y)
        if span == 0:
            return traj

        ceiling = mpf(blowup_ceiling)
        h_floor = mpf(10) ** (-(ctx.digits // 2))
        targets = sorted(
            {mpf(p) for p in (sample_points or []) if min(x0, x1) < mpf(p) < max(x0, x1)},
            reverse=(direction < 0),
        )
        targets.append(x1)

        # initial step from the rhs scale at the anchor
        f0 = rhs(x, y)
        scale = max(_norm(y), mpf(1))
        d0 = max(_norm(f0), mpf(1) / span)
        if fixed_step is not None:
            h = mpf(fixed_step)
        elif first_step is not None:
            h = mpf(first_step)
        else:
            h = (tol ** (mpf(1) / 8)) * scale / d0
        h = min(mpf(h), span if fixed_step is not None else span / 4)
        h = mpf(h) * direction

        ti = 0
        steps = 0
        dim = len(y)
        while ti < len(targets):
            target = targets[ti]
            if x == target:
                ti += 1
                continue
            remaining = target - x
            hit = fabs(h) >= fabs(remaining)
            h_use = remaining if hit else h
            steps += 1
            if steps > max_steps:
                raise StepUnderflow(f"exceeded {max_steps} steps before reaching {target}")

            k = [None] * 13
            k[0] = f0 if f0 is not None else rhs(x, y)
            for i in range(1, 13):
                yi = list(y)
                for j, aij in enumerate(A[i]):
                    if aij:
                        kj = k[j]
                        for m in range(dim):
                            yi[m] = yi[m] + h_use * aij * kj[m]
                k[i] = rhs(x + C[i] * h_use, tuple(yi))

            y_new = list(y)
            err_vec = [mpc(0)] * dim
            for i in range(13):
                bi, ei, ki = B8[i], E[i], k[i]
                if bi:
                    for m in range(dim):
                        y_new[m] = y_new[m] + h_use * bi * ki[m]
                if ei:
                    for m in range(dim):
                        err_vec[m] = err_vec[m] + h_use * ei * ki[m]

            err = max(fabs(e) for e in err_vec)
            scale = max(_norm(y), _norm(tuple(y_new)), mpf(1))
            tol_step = tol * scale
            if fixed_step is not None:
                err, fac = mpf(0), mpf(1)
            elif err > 0:
                fac = mpf("0.9") * (tol_step / err) ** (mpf(1) / 8)
                fac = max(mpf("0.2"), min(fac, mpf(4)))
            else:
                fac = mpf(4)

            if err <= tol_step:
                x = target if hit else x + h_use
                y = tuple(y_new)
                traj.xs.append(x)
                traj.states.append(y)
                traj.accepted += 1
                f0 = None  # recompute at the new point next round
                if _norm(y) > ceiling:
                    traj.status = "blowup"
                    traj.events.append(BlowupEvent(x_approach=x, state=y, norm=_norm(y)))
                    return traj
                if x == target:
                    ti += 1
                # a clipped step that succeeded should not shrink the gait
                h = h if hit else h_use * fac
            else:
                traj.rejected += 1
                h = h_use * fac

            if fabs(h) < h_floor:
                if _norm(y) > ceiling / 4:
                    traj.status = "blowup"
                    traj.events.append(BlowupEvent(x_approach=x, state=y, norm=_norm(y)))
                    return traj
                raise StepUnderflow(
                    f"step {fabs(h)} below floor {h_floor} at x={x} without blowup"
                )
        return traj
