"""Scalar modes: exact rationals or binary floats.

Every metric kernel in the package is written against plain arithmetic
operators, so the same function evaluates exactly on rationals and
approximately on floats. This module supplies the conversions and the
comparison rules for each mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

try:
    import gmpy2

    _mpq = gmpy2.mpq
    _RATIONAL_TYPES: tuple = (int, Fraction, type(gmpy2.mpq(0)), type(gmpy2.mpz(0)))
except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None
    _mpq = Fraction
    _RATIONAL_TYPES = (int, Fraction)

DEFAULT_TOL = 1e-12


class Mode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


def rational(x) -> "Fraction":
    """Convert ``x`` to the exact rational backend.

    Strings may be ``"3/5"``, ``"0.25"`` or ``"1e-3"``; floats convert
    exactly (their binary value, not their decimal repr).
    """
    if isinstance(x, str):
        x = Fraction(x.strip())
    elif isinstance(x, Fraction):
        pass
    elif not isinstance(x, (float,) + _RATIONAL_TYPES):
        # numpy scalars and friends
        x = Fraction(x.item() if hasattr(x, "item") else x)
    return _mpq(x)


def is_exact(x) -> bool:
    return isinstance(x, _RATIONAL_TYPES)


def to_mode(x, mode: Mode):
    mode = Mode(mode)
    if mode is Mode.EXACT:
        return rational(x)
    if isinstance(x, str):
        return float(Fraction(x.strip()))
    return float(x)


def floor(x) -> int:
    return int(math.floor(x))


def ceil(x) -> int:
    return int(math.ceil(x))


def exact_sqrt(x):
    """Square root of a non-negative rational, or ``None`` if irrational."""
    q = rational(x)
    if q < 0:
        raise ValueError(f"negative argument {q}")
    num, den = int(q.numerator), int(q.denominator)
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return _mpq(rn, rd)
    return None


def sqrt(x):
    """Exact square root when it is rational, float otherwise."""
    if is_exact(x):
        root = exact_sqrt(x)
        if root is not None:
            return root
    return math.sqrt(float(x))


def fmt(x) -> str:
    """Serialise a scalar: ``num/den`` for rationals, ``repr`` for floats."""
    if is_exact(x):
        q = rational(x)
        return f"{q.numerator}/{q.denominator}"
    return repr(float(x))


def fmt_point(p) -> str:
    return ";".join(fmt(c) for c in p)


@dataclass(frozen=True)
class Comparator:
    """Comparison rules for one mode.

    Exact mode compares with no rounding. Float mode refuses to compare
    without an explicit tolerance.
    """

    mode: Mode = Mode.EXACT
    tol: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.FLOAT and self.tol is None:
            raise ValueError("float-mode comparisons need an explicit tolerance")

    def eq(self, a, b) -> bool:
        if self.mode is Mode.EXACT:
            return a == b
        return abs(a - b) <= self.tol

    def le(self, a, b) -> bool:
        if self.mode is Mode.EXACT:
            return a <= b
        return a <= b + self.tol

    def positive(self, a) -> bool:
        if self.mode is Mode.EXACT:
            return a > 0
        return a > self.tol
