"""Working-precision context and helpers for extended-precision scalars.

Every public operation in the package runs under exactly one
:class:`PrecisionContext`; kernels enter ``ctx.workdps()`` so that all
mpmath arithmetic is carried out at the context precision (plus a fixed
number of guard digits inside quadrature and seeding kernels, which only
tightens results).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpc, mpf

# Guard digits used inside quadrature / projection kernels.  Results are
# still reported at context precision; the guard only absorbs roundoff in
# node generation and near-endpoint cancellation.
GUARD_DIGITS = 20


def _tol_floor(digits):
    return mpf(10) ** (-digits + 10)


@dataclass(frozen=True)
class PrecisionContext:
    """Global numerical policy: decimal digits plus tolerance targets.

    Invariants: digits >= 30, and both tolerances are achievable at the
    working precision (>= 10^(-digits+10)).
    """

    digits: int
    quad_tol: object = None  # mpf
    ode_tol: object = None  # mpf

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError(f"digits must be >= 30, got {self.digits}")
        with mp.workdps(self.digits + GUARD_DIGITS):
            floor = _tol_floor(self.digits)
            qt = self.quad_tol
            ot = self.ode_tol
            if qt is None:
                qt = mpf(10) ** (-self.digits + 15)
            else:
                qt = mpf(qt)
            if ot is None:
                ot = mpf(10) ** (-(self.digits // 2))
            else:
                ot = mpf(ot)
            if qt < floor:
                raise ValueError(f"quad_tol={qt} below achievable floor {floor}")
            if ot < floor:
                raise ValueError(f"ode_tol={ot} below achievable floor {floor}")
            object.__setattr__(self, "quad_tol", qt)
            object.__setattr__(self, "ode_tol", ot)

    def workdps(self, extra=0):
        """Context manager setting mp.dps for the scope of a kernel."""
        return mp.workdps(self.digits + extra)

    def guarded(self):
        return mp.workdps(self.digits + GUARD_DIGITS)

    @property
    def eps(self):
        with self.workdps():
            return mpf(10) ** (-self.digits)

    def with_digits(self, digits, scale_tols=True):
        """A context at different precision, shifting tolerances along."""
        if not scale_tols:
            return PrecisionContext(digits, self.quad_tol, self.ode_tol)
        shift = digits - self.digits
        with mp.workdps(max(digits, self.digits) + GUARD_DIGITS):
            return PrecisionContext(
                digits,
                self.quad_tol * mpf(10) ** (-shift),
                self.ode_tol * mpf(10) ** (-shift),
            )


def to_mpf(x):
    """Convert int/str/Fraction/mpf to mpf at the current working precision.

    Fractions and rational strings like '-1/12' convert by exact division
    so the only rounding is the final one.  mpc values with exactly zero
    imaginary part (as produced by path maps over real segments) are
    accepted and collapsed to their real part.
    """
    if isinstance(x, Fraction):
        return mpf(x.numerator) / mpf(x.denominator)
    if isinstance(x, str) and "/" in x:
        frac = Fraction(x)
        return mpf(frac.numerator) / mpf(frac.denominator)
    if isinstance(x, mpc):
        if x.imag == 0:
            return mpf(x.real)
        raise ValueError(f"cannot convert complex {x} with nonzero imaginary part")
    return mpf(x)


def to_mpc(x):
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return mpc(to_mpf(x[0]), to_mpf(x[1]))
    if isinstance(x, Fraction):
        return mpc(to_mpf(x))
    return mpc(x)


def as_exact(t):
    """Keep exact rational parameters exact; pass mpf through.

    Critical-point arithmetic (t = -1/12) must not be contaminated by
    binary rounding of 1/12, so parameters given as Fraction/int/str stay
    Fractions until the final evaluation.
    """
    if isinstance(t, Fraction):
        return t
    if isinstance(t, int):
        return Fraction(t)
    if isinstance(t, str):
        return Fraction(t)
    return t  # mpf or float: caller accepts rounding
