"""Curves, bad points and separation gauges.

A boundary point is *bad* when two curves ending there stay a positive
distance apart in the limit. It is *r-bad* for a gauge ``r`` when, in
addition, the Euclidean separation of such a pair is ``O(r(t))``. A
finite curve family can only ever certify badness; a negative verdict
means that no witness was found at this resolution.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .holeblowup import dyadic_t_list
from .metric import DomainError, MetricDescriptor, euclidean, run_chunks
from .scalar import fmt

BAD_THRESHOLD = 1e-2
STABLE_TOL = 1e-2
RATIO_CAP = 1e3
DEFAULT_SLOPES = (0, Fraction(1, 2), Fraction(-1, 2), 1, -1)  # Fraction keeps float and exact inputs in their mode


@dataclass(frozen=True)
class Curve:
    """A curve ``t -> point`` on ``(0, t_max]`` with a declared limit at 0.

    Standard-form curves have first coordinate ``t``.
    """

    func: Callable
    limit: tuple
    label: str = ""
    t_max: float = 1.0
    standard: bool = False
    inverse_first: Callable | None = field(default=None, repr=False, compare=False)

    def __call__(self, t):
        return self.func(t)

    def points(self, t_list) -> list:
        return [self.func(t) for t in t_list]


def line(point, c, label: str | None = None) -> Curve:
    """``t -> (p1 + t, p2 + c t)``."""
    p1, p2 = point[0], point[1]
    return Curve(lambda t: (p1 + t, p2 + c * t), tuple(point), label or f"line c={c}", standard=p1 == 0)


def parabola(point, c, label: str | None = None) -> Curve:
    """``t -> (p1 + t, p2 + c t^2)``."""
    p1, p2 = point[0], point[1]
    return Curve(lambda t: (p1 + t, p2 + c * t * t), tuple(point), label or f"parabola c={c}", standard=p1 == 0)


def ray(point, angle: float, label: str | None = None) -> Curve:
    u = (math.cos(angle), math.sin(angle))
    p1, p2 = float(point[0]), float(point[1])
    return Curve(lambda t: (p1 + t * u[0], p2 + t * u[1]), tuple(point), label or f"ray {angle!r}")


def _family_order(cs):
    return sorted(cs, key=lambda c: (abs(c), c < 0))


def line_family(point, slopes=DEFAULT_SLOPES) -> list[Curve]:
    return [line(point, c) for c in _family_order(slopes)]


def parabola_family(point, coeffs=DEFAULT_SLOPES) -> list[Curve]:
    return [parabola(point, c) for c in _family_order(coeffs) if c != 0]


def default_family(point, slopes=DEFAULT_SLOPES) -> list[Curve]:
    """Lines, then parabolas, each ordered by ``|c|`` with positive ``c`` first."""
    return line_family(point, slopes) + parabola_family(point, slopes)


def ray_family(point, angles: Sequence[float]) -> list[Curve]:
    return [ray(point, a) for a in angles]


def admissible(desc: MetricDescriptor, family: Sequence[Curve], t_list) -> list[Curve]:
    """Curves of ``family`` that stay in the domain at every ``t`` of ``t_list``."""
    return [c for c in family if all(desc.domain(p) for p in c.points(t_list))]


def curve_cauchy_check(desc: MetricDescriptor, c: Curve, t_list, tail_frac: float = 0.25) -> float:
    """Largest ``d(c(t), c(t'))`` over pairs from the tail of ``t_list``."""
    t_list = list(t_list)
    q = max(2, int(len(t_list) * tail_frac))
    pts = c.points(t_list[-q:])
    for p in pts:
        if not desc.domain(p):
            raise DomainError(p, desc.name)
    return max((desc.dist(a, b) for a, b in combinations(pts, 2)), default=0.0)


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    oscillation: float
    values: tuple = field(repr=False, default=())


def limit_estimate(desc: MetricDescriptor, a: Curve, b: Curve, t_list) -> LimitEstimate:
    """Last value of ``d(a(t), b(t))`` and its oscillation over the last quarter."""
    vals = []
    for t in t_list:
        p, q = a(t), b(t)
        for x in (p, q):
            if not desc.domain(x):
                raise DomainError(x, desc.name)
        vals.append(desc.dist(p, q))
    qn = max(2, len(vals) // 4)
    tail = vals[-qn:]
    return LimitEstimate(vals[-1], max(tail) - min(tail), tuple(vals))


# --------------------------------------------------------------------------
# gauges


@dataclass(frozen=True)
class Gauge:
    """A positive function ``r`` on ``(0, 1]`` tending to 0.

    An estimated gauge is a staircase over dyadic bins
    ``(2^-(i+1), 2^-i]`` with values ``steps[i]`` for ``i < len(steps)`` and
    the linear tail ``steps[-1] * t * 2^len(steps)`` below. An analytic
    gauge wraps a callable instead.
    """

    steps: tuple = ()
    func: Callable | None = None
    name: str = "staircase"

    @classmethod
    def identity(cls) -> "Gauge":
        return cls(func=lambda t: t, name="t")

    @classmethod
    def from_function(cls, f: Callable, name: str) -> "Gauge":
        return cls(func=f, name=name)

    def __call__(self, t):
        if self.func is not None:
            return self.func(t)
        i = dyadic_bin(t)
        if i < len(self.steps):
            return self.steps[i]
        return self.steps[-1] * t * 2.0 ** len(self.steps)

    def breakpoints(self) -> list[tuple[float, float]]:
        """Bridge nodes ``(2^-i, s_i)`` with ``s_0 = r_0`` and ``s_i = min(r_i, s_(i-1) / 2)``.

        The nodes lie on or below the staircase and ``s(t) / t`` never
        decreases in ``t``, so every bridge segment has slope at least
        ``s_0`` and the bridge stays strictly increasing in floating point.
        """
        out = []
        for i, r in enumerate(self.steps):
            s_i = float(r) if not out else min(float(r), out[-1][1] / 2.0)
            out.append((2.0**-i, s_i))
        return out

    def _nodes(self) -> tuple[list[float], list[float]]:
        bp = self.breakpoints()[::-1]  # increasing t
        return [0.0] + [b[0] for b in bp], [0.0] + [b[1] for b in bp]

    def interp(self, t: float) -> float:
        """Strictly increasing piecewise-linear bridge through ``(0, 0)`` and the breakpoints."""
        if self.func is not None:
            return float(self.func(t))
        ts, rs = self._nodes()
        return _piecewise(t, ts, rs)

    def interp_inverse(self, s: float) -> float:
        if self.func is not None:
            return _bisect_inverse(self.func, s)
        ts, rs = self._nodes()
        return _piecewise(s, rs, ts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "r"])
        if self.func is not None:
            for i in range(0, 31):
                t = 2.0**-i
                w.writerow([repr(t), repr(float(self.func(t)))])
        else:
            for i, r in enumerate(self.steps):
                w.writerow([repr(2.0**-i), repr(float(r))])
        return buf.getvalue()


def _piecewise(x: float, xs: Sequence[float], ys: Sequence[float]) -> float:
    """Linear interpolation through increasing ``xs``, extended by the end segments."""
    x = float(x)
    k = int(np.searchsorted(xs, x)) if len(xs) > 2 else 1
    k = min(max(k, 1), len(xs) - 1)
    x0, x1, y0, y1 = xs[k - 1], xs[k], ys[k - 1], ys[k]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def _bisect_inverse(f: Callable, s: float, lo: float = 0.0, hi: float = 1.0, iters: int = 200) -> float:
    while f(hi) < s:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < s:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(hi, 1e-300):
            break
    return 0.5 * (lo + hi)


def dyadic_bin(t) -> int:
    """Index ``i`` with ``2^-(i+1) < t <= 2^-i``."""
    if not t > 0:
        raise ValueError(f"t={t} must be positive")
    m, e = math.frexp(float(t))
    return 1 - e if m == 0.5 else -e


def estimate_gauge(samples: Sequence[tuple], v_min: float = 0.0) -> Gauge:
    """Staircase ``r`` lying strictly below every sample separation.

    ``samples`` are ``(t, u, v)`` with ``u`` the Euclidean separation and
    ``v`` the metric distance of a curve pair at parameter ``t``; only
    samples with ``v >= v_min`` enter. Each bin gets half the minimum
    ``u`` it contains, then a running minimum from large ``t`` downward
    makes ``r`` non-increasing toward 0.
    """
    kept = [(t, u) for t, u, v in samples if v >= v_min]
    if not kept:
        raise ValueError("estimate_gauge needs at least one sample")
    raw: dict[int, float] = {}
    for t, u in kept:
        if not u > 0:
            raise ValueError(f"sample at t={t} has zero separation; no positive gauge lies below it")
        i = dyadic_bin(t)
        half = u / 2
        if i not in raw or half < raw[i]:
            raw[i] = half
    last = max(raw)
    steps = []
    cur = raw[min(raw)]
    for i in range(last + 1):
        if i in raw and raw[i] < cur:
            cur = raw[i]
        steps.append(cur)
    return Gauge(steps=tuple(steps))


# --------------------------------------------------------------------------
# detection


@dataclass(frozen=True)
class PairEstimate:
    i: int
    j: int
    limit: float
    oscillation: float

    @property
    def bad(self) -> bool:
        return self.limit > BAD_THRESHOLD and self.oscillation <= STABLE_TOL


@dataclass
class BadnessReport:
    point: tuple
    bad: bool
    curves: list
    pairs: list
    witness: tuple | None = None  # indices into curves
    limit: float = 0.0
    oscillation: float = 0.0
    r_bad: dict = field(default_factory=dict)
    ratio_sup: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "bad" if self.bad else "no witness found at this resolution"

    def witness_labels(self) -> tuple | None:
        if self.witness is None:
            return None
        return (self.curves[self.witness[0]].label, self.curves[self.witness[1]].label)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# point={';'.join(fmt(x) for x in self.point)}\n")
        buf.write(f"# verdict={self.verdict}\n")
        if self.witness is not None:
            a, b = self.witness_labels()
            buf.write(f"# witness={a}|{b} limit={self.limit!r}\n")
        for g, v in sorted(self.r_bad.items()):
            buf.write(f"# r_bad[{g}]={v} ratio_sup={self.ratio_sup.get(g)!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["curve_a", "curve_b", "limit", "oscillation", "bad"])
        for p in self.pairs:
            w.writerow([self.curves[p.i].label, self.curves[p.j].label, repr(float(p.limit)),
                        repr(float(p.oscillation)), int(p.bad)])
        return buf.getvalue()


def _pick_witness(pairs: Sequence[PairEstimate], ref: int = 0) -> PairEstimate | None:
    bad = [p for p in pairs if p.bad]
    if not bad:
        return None
    with_ref = [p for p in bad if ref in (p.i, p.j)] or bad
    # largest limit first; equal limits resolved by family order
    return min(with_ref, key=lambda p: (-p.limit, p.i, p.j))


def detect_bad(desc: MetricDescriptor, point, family: Sequence[Curve] | None = None, t_list=None,
               workers: int = 1) -> BadnessReport:
    """Scan every pair of admissible curves for a non-vanishing limit distance."""
    t_list = list(t_list) if t_list is not None else dyadic_t_list()
    family = default_family(point) if family is None else list(family)
    curves = admissible(desc, family, t_list)
    idx = list(combinations(range(len(curves)), 2))

    def work(k: int, _n: int):
        i, j = idx[k]
        est = limit_estimate(desc, curves[i], curves[j], t_list)
        return PairEstimate(i, j, float(est.value), float(est.oscillation))

    pairs = run_chunks(work, [(k, 1) for k in range(len(idx))], workers)
    wit = _pick_witness(pairs)
    rep = BadnessReport(tuple(point), wit is not None, curves, pairs)
    if wit is not None:
        rep.witness, rep.limit, rep.oscillation = (wit.i, wit.j), wit.limit, wit.oscillation
    return rep


def ratio_sup(a: Curve, b: Curve, gauge: Gauge, t_list) -> float:
    """``sup |a(t) - b(t)| / r(t)`` over ``t_list``."""
    return max(euclidean(a(t), b(t)) / float(gauge(t)) for t in t_list)


def detect_r_bad(desc: MetricDescriptor, point, family: Sequence[Curve] | None, gauge: Gauge, t_list=None,
                 cap: float = RATIO_CAP, base: BadnessReport | None = None) -> BadnessReport:
    """Bad witnesses whose separation ratio against ``gauge`` stays below ``cap``.

    With ``gauge = Gauge.identity()`` this is the t-bad test. The witness
    of the returned report is the r-bad pair chosen by the same rule as in
    ``detect_bad``.
    """
    t_list = list(t_list) if t_list is not None else dyadic_t_list()
    rep = base if base is not None else detect_bad(desc, point, family, t_list)
    bounded = []
    best = math.inf
    for p in rep.pairs:
        if not p.bad:
            continue
        s = ratio_sup(rep.curves[p.i], rep.curves[p.j], gauge, t_list)
        best = min(best, s)
        if s <= cap:
            bounded.append(p)
    rep.r_bad[gauge.name] = bool(bounded)
    wit = _pick_witness(bounded)
    if wit is not None:
        rep.ratio_sup[gauge.name] = ratio_sup(rep.curves[wit.i], rep.curves[wit.j], gauge, t_list)
        rep.witness, rep.limit, rep.oscillation = (wit.i, wit.j), wit.limit, wit.oscillation
    else:
        rep.ratio_sup[gauge.name] = best
    return rep


def gauge_samples(desc: MetricDescriptor, report: BadnessReport, t_list=None, v_min: float = BAD_THRESHOLD) -> list:
    """``(t, u, v)`` triples along every bad pair of ``report``."""
    t_list = list(t_list) if t_list is not None else dyadic_t_list()
    out = []
    for p in report.pairs:
        if p.limit < v_min:
            continue
        a, b = report.curves[p.i], report.curves[p.j]
        for t in t_list:
            pa, pb = a(t), b(t)
            out.append((t, euclidean(pa, pb), float(desc.dist(pa, pb))))
    return out


def standard_reparam(c: Curve, s_max: float | None = None, probe: int = 64) -> Curve:
    """Reparametrise ``c`` by its first coordinate.

    The first coordinate must increase strictly from its limit near 0; it
    is inverted by bisection. Raises ``ValueError`` otherwise.
    """
    if c.standard:
        return c
    s_max = c.t_max if s_max is None else s_max
    g1 = lambda s: float(c(s)[0]) - float(c.limit[0])  # noqa: E731
    grid = [s_max * 2.0 ** (-k / 4) for k in range(probe)][::-1]
    vals = [g1(s) for s in grid]
    if not all(b > a for a, b in zip(vals, vals[1:])) or vals[0] <= 0:
        raise ValueError(f"first coordinate of {c.label or 'curve'} is not strictly increasing near 0")
    t_top = g1(s_max)

    def inv(t: float) -> float:
        lo, hi = 0.0, s_max
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g1(mid) < t:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 2.0**-60 * hi:
                break
        return 0.5 * (lo + hi)

    base = float(c.limit[0])

    def func(t):
        p = c(inv(float(t)))
        return (base + float(t),) + tuple(p[1:])

    return Curve(func, c.limit, f"{c.label} (standard)", t_max=t_top, standard=True, inverse_first=inv)
