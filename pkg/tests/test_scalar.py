import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sametric.scalar import Comparator, Mode, exact_sqrt, fmt, fmt_point, is_exact, rational, sqrt, to_mode


def test_rational_parses_strings_exactly():
    assert rational("3/5") == Fraction(3, 5)
    assert rational("1e-3") == Fraction(1, 1000)
    assert rational("0.25") == Fraction(1, 4)


def test_float_converts_to_its_binary_value():
    assert rational(0.1) == Fraction(0.1)
    assert rational(0.1) != Fraction(1, 10)


def test_exact_sqrt_only_for_squares():
    assert exact_sqrt(rational(9) / 16) == Fraction(3, 4)
    assert exact_sqrt(2) is None
    assert sqrt(rational(25)) == 5 and is_exact(sqrt(rational(25)))
    assert sqrt(rational(2)) == pytest.approx(math.sqrt(2))
    with pytest.raises(ValueError):
        exact_sqrt(-1)


def test_fmt():
    assert fmt(rational(3) / 5) == "3/5"
    assert fmt(0.5) == "0.5"
    assert fmt_point((rational(1), rational(-1) / 2)) == "1/1;-1/2"


def test_float_comparator_requires_tolerance():
    with pytest.raises(ValueError):
        Comparator(Mode.FLOAT)
    c = Comparator(Mode.FLOAT, 1e-9)
    assert c.eq(1.0, 1.0 + 1e-10) and not c.eq(1.0, 1.0 + 1e-8)
    assert c.le(1.0 + 1e-10, 1.0)
    assert not c.positive(1e-10)


def test_exact_comparator_has_no_slack():
    c = Comparator(Mode.EXACT)
    assert not c.eq(rational(1), rational(1) + rational(1) / 10**30)
    assert c.positive(rational(1) / 10**30)


@given(st.fractions(), st.fractions())
def test_exact_arithmetic_is_closed(a, b):
    x, y = rational(a), rational(b)
    assert is_exact(x + y) and is_exact(x * y)
    assert (x + y) - y == x


def test_to_mode():
    assert to_mode("1/3", Mode.FLOAT) == pytest.approx(1 / 3)
    assert to_mode("1/3", Mode.EXACT) == Fraction(1, 3)
