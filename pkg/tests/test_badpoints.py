import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sametric.badpoints import (Curve, Gauge, admissible, curve_cauchy_check, default_family, detect_bad,
                                detect_r_bad, dyadic_bin, estimate_gauge, gauge_samples, limit_estimate, line,
                                parabola, ratio_sup, standard_reparam)
from sametric.fixtures import ANNULUS, ANNULUS_EPS, EUCLID_STRIP, SIGMA
from sametric.holeblowup import dyadic_t_list
from sametric.metric import MetricDescriptor, euclidean

from oracles import sigma_direction_limit

T = dyadic_t_list()


def test_family_order_and_labels():
    fam = default_family((0.0, 0.0))
    labels = [c.label for c in fam]
    assert labels[:5] == ["line c=0", "line c=1/2", "line c=-1/2", "line c=1", "line c=-1"]
    assert labels[5] == "parabola c=1/2" and len(fam) == 9
    assert all(c.standard for c in fam)


def test_admissible_filters_curves_leaving_domain():
    fam = default_family((0.0, 1.0))
    kept = admissible(SIGMA, fam, T)
    assert all(c(T[0])[1] <= 1 for c in kept) and len(kept) < len(fam)


def test_cauchy_on_sigma_lines():
    for c in default_family((0.0, 0.0)):
        assert curve_cauchy_check(SIGMA, c, T) < 1e-6


def test_sigma_origin_is_t_bad():
    rep = detect_bad(SIGMA, (0.0, 0.0))
    assert rep.bad and rep.witness_labels() == ("line c=0", "line c=1")
    assert rep.limit == pytest.approx(sigma_direction_limit(1) - sigma_direction_limit(0), abs=1e-9)
    detect_r_bad(SIGMA, (0.0, 0.0), None, Gauge.identity(), base=rep)
    assert rep.r_bad["t"] and rep.ratio_sup["t"] == pytest.approx(1.0)
    assert "# witness=line c=0|line c=1" in rep.to_csv()


def test_sigma_edge_point_is_not_bad():
    rep = detect_bad(SIGMA, (0.0, 0.5))
    assert not rep.bad and rep.verdict == "no witness found at this resolution"


def test_annulus_centre_limit_matches_pulled_back_separation():
    rep = detect_bad(ANNULUS, (0.0, 0.0))
    a, b = rep.curves[rep.witness[0]], rep.curves[rep.witness[1]]
    u, v = np.array(a(1.0)), np.array(b(1.0))
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert rep.limit == pytest.approx(float(ANNULUS_EPS) * np.linalg.norm(u - v), abs=1e-6)


def _root_metric():
    # the jump coordinate min(1, |x2| / sqrt(x1)) separates the axis from the curve (t, sqrt t)
    def f(p):
        x1, x2 = float(p[0]), float(p[1])
        return min(1.0, abs(x2) / math.sqrt(x1))

    def dist(p, q):
        return euclidean(p, q) + abs(f(p) - f(q))

    return MetricDescriptor("synthetic.root", dist, lambda p: 0 < p[0] <= 1 and -1 <= p[1] <= 1, False, "",
                            ((0, 1), (-1, 1)))


def test_bad_but_not_t_bad():
    desc = _root_metric()
    fam = [line((0.0, 0.0), 0), Curve(lambda t: (t, math.sqrt(t)), (0.0, 0.0), "root", standard=True)]
    rep = detect_bad(desc, (0.0, 0.0), fam)
    assert rep.bad and rep.limit == pytest.approx(1.0, abs=1e-4)
    detect_r_bad(desc, (0.0, 0.0), fam, Gauge.identity(), base=rep)
    assert not rep.r_bad["t"] and rep.ratio_sup["t"] > 1e3
    detect_r_bad(desc, (0.0, 0.0), fam, Gauge.from_function(math.sqrt, "sqrt"), base=rep)
    assert rep.r_bad["sqrt"]


def test_r_bad_monotone_in_gauge():
    # a slower gauge divides by more, so r-bad for a faster gauge implies r-bad for a slower one
    rep = detect_bad(SIGMA, (0.0, 0.0))
    for g in [Gauge.from_function(lambda t: t, "t"), Gauge.from_function(math.sqrt, "sqrt")]:
        detect_r_bad(SIGMA, (0.0, 0.0), None, g, base=rep)
    assert rep.r_bad["t"] and rep.r_bad["sqrt"]
    assert rep.ratio_sup["sqrt"] <= rep.ratio_sup["t"]


def test_limit_estimate_symmetric():
    a, b = line((0.0, 0.0), 0), line((0.0, 0.0), -1)
    assert limit_estimate(SIGMA, a, b, T).value == limit_estimate(SIGMA, b, a, T).value


def test_euclidean_has_no_bad_points():
    for x2 in (-1.0, 0.0, 0.3):
        assert not detect_bad(EUCLID_STRIP, (0.0, x2)).bad


def test_standard_reparam_of_squared_curve():
    c = Curve(lambda s: (s * s, s * s), (0.0, 0.0), "diag^2")
    sc = standard_reparam(c)
    assert sc.standard
    for t in [0.5, 0.1, 1e-4, 1e-8]:
        p = sc(t)
        assert abs(p[0] - t) < 1e-12 and abs(p[1] - t) < 1e-12
    with pytest.raises(ValueError):
        standard_reparam(Curve(lambda s: (-s, 0.0), (0.0, 0.0)))


def test_dyadic_bin():
    assert dyadic_bin(1.0) == 0 and dyadic_bin(0.5) == 1 and dyadic_bin(0.75) == 0 and dyadic_bin(0.3) == 1
    with pytest.raises(ValueError):
        dyadic_bin(0)


samples = st.lists(st.tuples(st.integers(0, 30), st.floats(0.0, 1.0), st.floats(1e-9, 1.0), st.floats(0.0, 1.0)),
                   min_size=1, max_size=40)


@given(samples)
@settings(max_examples=60)
def test_gauge_contract(raw):
    s = [(2.0**-i * (0.5 + 0.5 * f), u, v) for i, f, u, v in raw]
    g = estimate_gauge(s)
    for t, u, _ in s:
        assert 0 < g(t) < u
    assert g.interp(0.0) == 0.0
    xs = sorted({2.0**-i for i in range(40)})
    vals = [g.interp(x) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(g.interp(x) <= g(x) for x in xs)
    for x in xs:
        assert g.interp_inverse(g.interp(x)) == pytest.approx(x, rel=1e-9)
    tops = [g(2.0**-i) for i in range(40)]
    assert all(b <= a for a, b in zip(tops, tops[1:]))


def test_sigma_gauge_is_small():
    rep = detect_bad(SIGMA, (0.0, 0.0))
    g = estimate_gauge(gauge_samples(SIGMA, rep, T), 1e-2)
    assert 0 < g(2.0**-10) < 1e-2
    assert ratio_sup(rep.curves[0], rep.curves[3], g, T) >= 2.0
    assert g.to_csv().startswith("t,r\n")


def test_gauge_trivial_examples():
    assert estimate_gauge([(0.5, 0.25, 1.0)])(0.5) == 0.125
    g = estimate_gauge([(2.0**-i, 1.0, 1.0) for i in range(8)])
    assert all(g(2.0**-i) == 0.5 for i in range(8))
    with pytest.raises(ValueError):
        estimate_gauge([])
