"""Independent reference implementations used as test oracles.

They work on ``fractions.Fraction`` only and follow the definitions
literally, without the shortcuts taken by the package.
"""

from fractions import Fraction as F


def q(x) -> F:
    if isinstance(x, (str, int, F)):
        return F(x)
    # gmpy2 rationals and other exact types expose numerator/denominator
    return F(int(x.numerator), int(x.denominator))


def d_strip_ref(x, y):
    """Piecewise strip metric straight from its definition, with the swap clause."""
    x1, x2, y1, y2 = map(q, (*x, *y))
    if y1 > x1:
        return d_strip_ref(y, x)
    if x1 - y1 <= x1 / 2 and abs(x2 - y2) <= x1 / 2:
        return max(x1 - y1, abs(x2 - y2))
    return x1 / 2


def phi_ref(t):
    return -1 / q(t) + 1


def d_disk_ref(b, c, twisted=False, span=10):
    """Quotient distance by brute force over deck shifts ``|n| <= span``."""
    rb, ab, rc, ac = map(q, (*b, *c))
    if rb == 0 or rc == 0:
        return max(rb, rc) / 2
    if twisted:
        ab, ac = ab + phi_ref(rb), ac + phi_ref(rc)
    return min(d_strip_ref((rb, ab), (rc, ac + 2 * n)) for n in range(-span, span + 1))


def sigma_direction_limit(c) -> float:
    """Limit of ``x2/|x|`` along ``(t, c t)`` as ``t -> 0``."""
    return float(c) / (1 + float(c) ** 2) ** 0.5
