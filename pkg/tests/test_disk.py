from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sametric.disk import (DISK_D, DISK_D_TWISTED, ORIGIN, DiskPoint, check_condition_star, check_condition_starstar,
                           d_disk, d_disk_bruteforce, d_disk_twisted, disk_point, from_cartesian, lift, project,
                           reduce_angle, shift_reduce, to_cartesian)
from sametric.metric import SampleConfig, check_boundedness, check_metric_axioms
from sametric.scalar import rational

from oracles import d_disk_ref

q = rational
rs = st.fractions(min_value=0, max_value=1, max_denominator=10**5)
angs = st.fractions(min_value=-6, max_value=6, max_denominator=10**5)
dpts = st.tuples(rs, angs).map(lambda p: disk_point(q(p[0]), q(p[1])))


def test_shift_reduce_examples():
    # |x2 - y2 - 2n| is minimised by n = -1 here: the gap becomes 1/5
    assert shift_reduce(q(1) / 10, q(19) / 10) == -1
    assert shift_reduce(q(3) / 7, q(3) / 7) == 0
    assert shift_reduce(q(0), q(1)) == -1  # tie between n = 0 and n = -1
    assert shift_reduce(q(1), q(0)) == 0


@given(angs, angs)
def test_shift_reduce_minimises_gap(x, y):
    x, y = q(x), q(y)
    n0 = shift_reduce(x, y)
    best = min(abs(x - y - 2 * n) for n in range(-20, 21))
    assert abs(x - y - 2 * n0) == best
    assert all(abs(x - y - 2 * n) > best for n in range(-20, n0))


def test_examples():
    assert d_disk(ORIGIN, disk_point(q(3) / 5, q(1) / 3)) == q(3) / 10
    assert d_disk(DiskPoint(q(4) / 5, q(1) / 10), DiskPoint(q(4) / 5, q(19) / 10)) == q(1) / 5
    b = DiskPoint(q(1) / 2, q(1) / 3)
    assert d_disk(b, b) == 0 and d_disk_twisted(b, b) == 0
    assert d_disk_twisted(ORIGIN, disk_point(q(3) / 5, q(5) / 4)) == q(3) / 10


@given(angs)
def test_equal_radii_cancel_the_twist(a):
    b, c = DiskPoint(q(1), q(0)), disk_point(q(1), q(a))
    assert d_disk_twisted(b, c) == d_disk(b, c)


@given(dpts, dpts)
def test_three_shifts_match_bruteforce(b, c):
    assert d_disk(b, c) == d_disk_bruteforce(b, c) == d_disk_ref(b, c)
    assert d_disk_twisted(b, c) == d_disk_bruteforce(b, c, twisted=True) == d_disk_ref(b, c, twisted=True)


@given(dpts, dpts, st.integers(-2, 2), st.integers(-2, 2))
def test_well_defined_on_representatives(b, c, k, m):
    bb, cc = (b[0], b[1] + 2 * k), (c[0], c[1] + 2 * m)
    assert d_disk(bb, cc) == d_disk(b, c)
    assert d_disk_twisted(bb, cc) == d_disk_twisted(b, c)


def test_canonical_points():
    assert disk_point(q(0), q(1) / 3) == ORIGIN
    assert disk_point(q(1), q(-1) / 2) == (1, q(3) / 2)
    assert reduce_angle(q(5)) == 1 and reduce_angle(q(-1) / 4) == q(7) / 4
    b = DiskPoint(q(2) / 3, q(1) / 5)
    assert project(lift(b, 3)) == b


def test_cartesian():
    assert to_cartesian(ORIGIN) == (0.0, 0.0)
    assert to_cartesian((1, 0)) == (1.0, 0.0)
    x, y = to_cartesian((1, 1))
    assert abs(x + 1) < 1e-12 and abs(y) < 1e-12
    b = from_cartesian(*to_cartesian((0.5, 1.75)))
    assert b[0] == pytest.approx(0.5) and b[1] == pytest.approx(1.75)


@pytest.mark.parametrize("desc", [DISK_D, DISK_D_TWISTED])
def test_axioms_exact_with_origin(desc):
    rep = check_metric_axioms(desc, SampleConfig(seed=9, count=3000, special_rate=0.1))
    assert rep.ok
    assert check_boundedness(desc, SampleConfig(seed=9, count=3000)) <= q(1) / 2


@pytest.mark.parametrize("twisted", [False, True])
def test_condition_star(twisted):
    rep = check_condition_star(SampleConfig(seed=3, count=4000), twisted=twisted)
    assert rep.ok
    assert rep.checked["equal_within_gap"] > 0 and rep.checked["bounded_outside_gap"] > 0


def test_condition_star_strict_outside_gap():
    p, r = (q(1), q(0)), (q(1), q(3))
    assert d_disk(p, r) == q(1) / 2 or d_disk(p, r) <= q(1) / 2
    p, r = (q(1), q(0)), (q(1), q(2))
    assert d_disk(p, r) == 0 < q(1) / 2  # the representative two deck shifts away coincides with p


@pytest.mark.parametrize("rp", [q(1) / 4, q(3) / 5, q(1)])
@pytest.mark.parametrize("twisted", [False, True])
def test_condition_starstar_plateau(rp, twisted):
    t_list = [q(1) / 2**i for i in range(2, 21)]
    rep = check_condition_starstar(DiskPoint(rp, q(1) / 7), t_list, twisted=twisted)
    assert rep.exact_zero_below(rp / 2)
    assert rep.to_csv().splitlines()[0] == "t,a,value,target,diff"


def test_condition_starstar_rejects_origin():
    with pytest.raises(ValueError):
        check_condition_starstar(ORIGIN, [q(1) / 4])


def test_disk_kernel_matches_scalar():
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-1, 1, 400), rng.uniform(-1, 1, 400)
    for base in [(0.0, 0.0), (1.0, 0.0), (0.6, 1.3)]:
        v = DISK_D.kernel(base, x, y)
        vt = DISK_D_TWISTED.kernel(base, x, y)
        for k in range(400):
            b = from_cartesian(x[k], y[k])
            if b[0] > 1:
                assert np.isnan(v[k])
                continue
            assert v[k] == pytest.approx(float(d_disk(b, base)), abs=1e-12)
            assert vt[k] == pytest.approx(float(d_disk_twisted(b, base)), abs=1e-9)
