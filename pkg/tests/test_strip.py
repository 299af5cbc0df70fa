from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from sametric import kernels
from sametric.metric import DomainError, SampleConfig, check_boundedness, check_metric_axioms
from sametric.scalar import rational
from sametric.strip import (PHI, STRIP_DX, STRIP_DX_TWISTED, TwistFn, check_uniformity, d_strip, d_strip_twisted,
                            phi, shear)

from oracles import d_strip_ref, phi_ref

q = rational
x1s = st.fractions(min_value=Fraction(1, 10**6), max_value=1, max_denominator=10**6)
x2s = st.fractions(min_value=-5, max_value=5, max_denominator=10**6)
pts = st.tuples(x1s, x2s).map(lambda p: (q(p[0]), q(p[1])))


def test_examples():
    assert d_strip((q(4) / 5, q(1) / 10), (q(3) / 5, q(3) / 10)) == q(1) / 5
    assert d_strip((q(4) / 5, 0), (q(1) / 5, 0)) == q(2) / 5
    assert d_strip((q(1) / 3, q(7)), (q(1) / 3, q(7))) == 0


def test_phi_values():
    assert phi(1) == 0 and phi(q(1) / 2) == -1 and phi(q(1) / 1000) == -999
    with pytest.raises(DomainError):
        phi(0)


def test_twisted_examples():
    assert d_strip_twisted((q(1), 0), (q(1) / 2, q(1))) == q(1) / 2
    assert d_strip_twisted((q(1), 0), (q(1), 0)) == 0


@given(pts, pts)
def test_matches_reference(p, r):
    assert d_strip(p, r) == d_strip_ref(p, r)


@given(pts, pts)
def test_symmetric_and_capped(p, r):
    d = d_strip(p, r)
    assert d == d_strip(r, p)
    assert d <= max(p[0], r[0]) / 2


@given(pts, pts)
def test_local_max_form(p, r):
    m = min(p[0], r[0]) / 2
    assume(abs(p[0] - r[0]) <= m and abs(p[1] - r[1]) <= m)
    assert d_strip(p, r) == max(abs(p[0] - r[0]), abs(p[1] - r[1]))


@given(pts, pts, x2s)
def test_twisted_equals_sheared(p, r, a):
    assert d_strip_twisted(p, r) == d_strip(shear(p), shear(r))
    shifted = lambda x: (x[0], x[1] + q(a))  # noqa: E731
    assert d_strip_twisted(shifted(p), shifted(r)) == d_strip_twisted(p, r)


@given(x1s, x2s, x2s)
def test_equal_first_coordinates_cancel_the_twist(t, a, b):
    t, a, b = q(t), q(a), q(b)
    assert d_strip_twisted((t, a), (t, b)) == d_strip((t, a), (t, b))


@given(x1s, x1s)
def test_phi_matches_reference_and_increases(s, t):
    assume(s < t)
    assert phi(q(s)) == phi_ref(s) and phi(q(s)) < phi(q(t))


@pytest.mark.parametrize("desc", [STRIP_DX, STRIP_DX_TWISTED])
def test_axioms_exact(desc):
    assert check_metric_axioms(desc, SampleConfig(seed=11, count=3000)).ok


def test_boundedness_is_half():
    cfg = SampleConfig(seed=2, count=5000, region=((0, 1), (-1, 1)))
    sup = check_boundedness(STRIP_DX, cfg)
    assert sup <= q(1) / 2


@pytest.mark.parametrize("desc,shift", [(STRIP_DX, q(7) / 3), (STRIP_DX, 0), (STRIP_DX_TWISTED, q(2))])
def test_uniformity(desc, shift):
    rep = check_uniformity(desc, shift, SampleConfig(seed=4, count=2000))
    assert rep.ok and rep.checked["uniformity"] == 2000


def test_custom_twist_is_pluggable():
    tw = TwistFn(lambda t: 1 - 1 / (t * t), "1-1/t^2")
    assert d_strip_twisted((q(1), 0), (q(1) / 2, q(3)), tw) == d_strip((q(1), 0), (q(1) / 2, 0))


def test_strip_kernel_matches_scalar_formula():
    rng = np.random.default_rng(0)
    x1, x2 = rng.uniform(0.01, 1, 500), rng.uniform(-2, 2, 500)
    for base in [(0.5, 0.0), (0.9, -1.2)]:
        v = STRIP_DX.kernel(base, x1, x2)
        ref = [float(d_strip((a, b), base)) for a, b in zip(x1, x2)]
        assert np.allclose(v, ref, atol=0, rtol=0)
        vt = STRIP_DX_TWISTED.kernel(base, x1, x2)
        reft = [float(d_strip_twisted((a, b), base)) for a, b in zip(x1, x2)]
        assert np.allclose(vt, reft, atol=1e-12)
    assert np.isnan(STRIP_DX.kernel((0.5, 0.0), np.array([0.0]), np.array([0.0])))[0]


def test_phi_array_form():
    assert np.allclose(PHI.array(np.array([1.0, 0.5])), [0.0, -1.0])
