"""Independent reference computations used by the tests.

Nothing here imports the code under test's decision logic: numeric checks
go through mpmath at 50 digits, combinatorial checks through brute force.
"""
from fractions import Fraction
import itertools

import mpmath

DPS = 50


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** exp


def numeric_rational(x, max_den: int = 10**6, tol: str = "1e-30"):
    """(is_rational, q): q is the best rational with denominator <= max_den;
    the value counts as rational if it lies within tol of q."""
    with mpmath.workdps(DPS):
        q = mpf_to_fraction(x).limit_denominator(max_den)
        err = abs(mpmath.mpf(x) - mpmath.mpf(q.numerator) / q.denominator)
        return err < mpmath.mpf(tol), q


def cos_turn(turn: Fraction):
    with mpmath.workdps(DPS):
        return mpmath.cos(2 * mpmath.pi * mpmath.mpf(turn.numerator) / turn.denominator)


def sum_amp2_and_turn(amp2_a, turn_a, amp2_b, turn_b):
    """|a + b|^2 and arg(a + b)/2pi (in [0, 1)) at 50 digits."""
    with mpmath.workdps(DPS):
        def z(a2, t):
            return mpmath.sqrt(mpmath.mpf(a2.numerator) / a2.denominator) * mpmath.expj(
                2 * mpmath.pi * mpmath.mpf(t.numerator) / t.denominator)
        s = z(amp2_a, turn_a) + z(amp2_b, turn_b)
        return abs(s) ** 2, (mpmath.arg(s) / (2 * mpmath.pi)) % 1


def omega_p4(s):
    """The printed p = 4 rule."""
    a1, a2, a3, a4 = s
    return (-a4, a3, a1, a2)


def all_strings(p):
    return list(itertools.product((1, -1), repeat=p))


def signed_perm_matrix(perm, sign):
    import numpy as np

    p = len(perm)
    m = np.zeros((p, p), dtype=int)
    for i in range(p):
        m[i, perm[i]] = sign[i]
    return m
