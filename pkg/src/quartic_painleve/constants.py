"""Scaling constants of the critical double-scaling regime.

The three constants are pure powers of 2 and 3, kept as exact exponent
pairs so the identity c2 = sqrt(2) * c3 is checked symbolically, not in
floating point.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mpf, power

# c = 2^a * 3^b stored as (a, b) with exact Fraction exponents.
_C1_EXP = (Fraction(-9, 5), Fraction(-6, 5))
_C2_EXP = (Fraction(3, 5), Fraction(2, 5))
_C3_EXP = (Fraction(1, 10), Fraction(2, 5))


def _eval_pow23(exps):
    a, b = exps
    return power(mpf(2), mpf(a.numerator) / a.denominator) * power(
        mpf(3), mpf(b.numerator) / b.denominator
    )


def c1():
    """Scale factor between t + 1/12 and the Painleve variable x."""
    return _eval_pow23(_C1_EXP)


def c2():
    """Coefficient of the n^(-2/5) term in the a_nn expansion."""
    return _eval_pow23(_C2_EXP)


def c3():
    """Coefficient of the n^(-2/5) term in the b_nn expansion."""
    return _eval_pow23(_C3_EXP)


def check_constant_identities():
    """Verify c2 = sqrt(2)*c3 by exact exponent arithmetic.

    Returns True; raises AssertionError if the symbolic identity fails.
    The remaining asserts pin the exponent tables against typos.
    """
    lhs = _C2_EXP
    rhs = (_C3_EXP[0] + Fraction(1, 2), _C3_EXP[1])
    assert lhs == rhs, f"c2 != sqrt(2)*c3 at exponent level: {lhs} vs {rhs}"
    assert _C1_EXP == (Fraction(-9, 5), Fraction(-6, 5))
    assert _C3_EXP == (Fraction(1, 10), Fraction(2, 5))
    return True
