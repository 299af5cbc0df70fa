"""The closed unit disk as a quotient of the strip.

A disk point is stored in strip coordinates ``(r, a)``: ``r`` is the
radius and ``a`` the angle in half-turns, so the Cartesian point is
``r * (cos(pi a), sin(pi a))``. The covering map identifies ``a`` with
``a + 2``, and the quotient distance is the minimum of the strip metric
over deck shifts. The origin is the single point with ``r = 0`` and sits
at distance ``r / 2`` from every other point.

Only three deck shifts around the nearest one are examined. The strip
metric is non-decreasing in ``|x2 - y2|`` for fixed first coordinates and
capped at ``max(x1, y1) / 2 <= 1/2``, so once ``|x2 - y2 - 2n| > 1`` no
shift can beat the nearest one.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .metric import AxiomReport, MetricDescriptor, SampleConfig, merge_reports, run_chunks, sample_points
from .scalar import Mode, ceil, floor, fmt, rational
from .strip import PHI, TwistFn, d_strip, d_strip_twisted


class DiskPoint(NamedTuple):
    r: object
    a: object

    @property
    def is_origin(self) -> bool:
        return self.r == 0


def reduce_angle(a):
    """Representative of ``a`` modulo 2 in ``[0, 2)``."""
    return a - 2 * floor(a / 2)


def disk_point(r, a=0) -> DiskPoint:
    """Canonical disk point; the origin always gets angle 0."""
    if r == 0:
        return DiskPoint(r, 0 * r)
    return DiskPoint(r, reduce_angle(a))


ORIGIN = DiskPoint(rational(0), rational(0))


def in_disk(b) -> bool:
    return 0 <= b[0] <= 1


def shift_reduce(x2, y2) -> int:
    """The ``n`` minimising ``|x2 - y2 - 2n|``, ties going to the smaller ``n``."""
    return ceil((x2 - y2 - 1) / 2)


def _quotient_min(x1, x2, y1, y2, dist):
    n0 = shift_reduce(x2, y2)
    best = None
    for n in (n0 - 1, n0, n0 + 1):
        v = dist((x1, x2), (y1, y2 + 2 * n))
        if best is None or v < best:
            best = v
    return best


def d_disk(b, c):
    if b[0] == 0:
        return c[0] / 2
    if c[0] == 0:
        return b[0] / 2
    return _quotient_min(b[0], b[1], c[0], c[1], d_strip)


def d_disk_twisted(b, c, tw: TwistFn = PHI):
    """Quotient of the twisted strip metric, shifts chosen on twisted angles."""
    if b[0] == 0:
        return c[0] / 2
    if c[0] == 0:
        return b[0] / 2
    u = b[1] + tw(b[0])
    v = c[1] + tw(c[0])
    return _quotient_min(b[0], u, c[0], v, d_strip)


def d_disk_bruteforce(b, c, twisted: bool = False, span: int = 10, tw: TwistFn = PHI):
    """Minimum over all shifts ``n`` in ``[-span, span]``; test oracle."""
    if b[0] == 0 or c[0] == 0:
        return max(b[0], c[0]) / 2
    dist = (lambda p, q: d_strip_twisted(p, q, tw)) if twisted else d_strip
    return min(dist((b[0], b[1]), (c[0], c[1] + 2 * n)) for n in range(-span, span + 1))


def lift(b, k: int = 0) -> tuple:
    """Strip representative ``(r, a + 2k)`` of a non-origin disk point."""
    return (b[0], b[1] + 2 * k)


def project(p) -> DiskPoint:
    return disk_point(p[0], p[1])


def to_cartesian(b) -> tuple[float, float]:
    r, a = float(b[0]), float(b[1])
    return (r * math.cos(math.pi * a), r * math.sin(math.pi * a))


def from_cartesian(x: float, y: float) -> DiskPoint:
    r = math.hypot(x, y)
    if r == 0.0:
        return DiskPoint(0.0, 0.0)
    return DiskPoint(r, (math.atan2(y, x) / math.pi) % 2.0)


def check_condition_star(cfg: SampleConfig, twisted: bool = False, x2_range=(-3, 3), tw: TwistFn = PHI) -> AxiomReport:
    """Compare the quotient minimum with the direct strip distance.

    For sampled strip pairs the quotient value must equal the direct one
    when the (twisted) second-coordinate gap is at most 1 and can never
    exceed it.
    """
    cmp = cfg.comparator()
    name = "condition_star_twisted" if twisted else "condition_star"
    direct = (lambda p, q: d_strip_twisted(p, q, tw)) if twisted else d_strip
    quotient = (lambda p, q: d_disk_twisted(p, q, tw)) if twisted else d_disk
    region = ((0, 1), x2_range)
    desc = MetricDescriptor(name="strip", dist=d_strip, domain=lambda p: 0 < p[0] <= 1, region=region)

    def work(stream: int, n: int) -> AxiomReport:
        rng = cfg.rng(stream, salt=4)
        pts = sample_points(desc, cfg, 2 * n, rng)
        rep = AxiomReport(name=name)
        for k in range(n):
            p, q = pts[2 * k], pts[2 * k + 1]
            gap = p[1] - q[1]
            if twisted:
                gap += tw(p[0]) - tw(q[0])
            dq, dd = quotient(p, q), direct(p, q)
            if abs(gap) <= 1:
                rep.tick("equal_within_gap", cmp.eq(dq, dd), (p, q), dq, dd)
            else:
                rep.tick("bounded_outside_gap", cmp.le(dq, dd), (p, q), dq, dd)
        return rep

    return merge_reports(name, run_chunks(work, cfg.chunks(), cfg.workers))


@dataclass
class ConvergenceReport:
    """Rows ``(t, a, value, target, diff)`` of a limit probe at the origin."""

    bprime: tuple
    twisted: bool = False
    rows: list = field(default_factory=list)

    def diffs_below(self, t_max) -> list:
        return [row[4] for row in self.rows if row[0] < t_max]

    def exact_zero_below(self, t_max) -> bool:
        vals = self.diffs_below(t_max)
        return bool(vals) and all(v == 0 for v in vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "a", "value", "target", "diff"])
        for row in self.rows:
            w.writerow([fmt(x) for x in row])
        return buf.getvalue()


def sample_angles(n: int, seed: int = 0, mode: Mode = Mode.EXACT, den: int = 2**20) -> list:
    """``n`` seeded angles in ``[0, 2)``, rational with denominator ``den`` in exact mode."""
    rng = np.random.default_rng([seed, 6])
    nums = rng.integers(0, 2 * den, size=n)
    if Mode(mode) is Mode.EXACT:
        return [rational(int(k)) / den for k in nums]
    return [float(k) / den for k in nums]


def check_condition_starstar(bprime, t_list: Sequence, twisted: bool = False, angles: Sequence | None = None,
                             seed: int = 0, tw: TwistFn = PHI) -> ConvergenceReport:
    """Distances from ``(t, a)`` to ``bprime`` minus ``r'/2`` as ``t`` decreases.

    Every sampled point with ``t < r'/2`` is separated from ``bprime`` by a
    first-coordinate gap larger than ``r'/2``, so the capped branch applies
    for every deck shift and the difference is exactly 0.
    """
    if bprime[0] == 0:
        raise ValueError("bprime must not be the origin")
    if angles is None:
        angles = sample_angles(32, seed)
    dist = (lambda p, q: d_disk_twisted(p, q, tw)) if twisted else d_disk
    target = bprime[0] / 2
    rep = ConvergenceReport(bprime=tuple(bprime), twisted=twisted)
    for t in t_list:
        for a in angles:
            v = dist((t, a), bprime)
            rep.rows.append((t, a, v, target, v - target))
    return rep


def _cartesian_chart(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r = np.hypot(x, y)
    a = np.mod(np.arctan2(y, x) / np.pi, 2.0)
    outside = r > 1.0
    return np.where(outside, np.nan, r), np.where(outside, np.nan, a)


def _disk_kernel(base, x, y):
    """Field ``d(., base)`` on Cartesian grid coordinates; NaN outside the disk."""
    r, a = _cartesian_chart(x, y)
    return kernels.disk_field(r, a, float(base[0]), float(base[1]))


def _disk_twisted_kernel(base, x, y, tw: TwistFn = PHI):
    r, a = _cartesian_chart(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = np.where(r > 0, a + tw.array(r), 0.0)
    br = float(base[0])
    ba = float(base[1]) + (float(tw(br)) if br > 0 else 0.0)
    return kernels.disk_field(r, ta, br, ba)


_DISK_META = {"render_region": ((-1.0, 1.0), (-1.0, 1.0)), "chart": "cartesian"}

DISK_D = MetricDescriptor(
    name="disk.d",
    dist=d_disk,
    domain=in_disk,
    exact_capable=True,
    provenance="quotient of the strip metric by the deck shift a -> a + 2, origin at distance r/2",
    region=((0, 1), (0, 2)),
    make_point=disk_point,
    specials=(ORIGIN,),
    kernel=_disk_kernel,
    meta=dict(_DISK_META),
)

DISK_D_TWISTED = MetricDescriptor(
    name="disk.d_twisted",
    dist=d_disk_twisted,
    domain=in_disk,
    exact_capable=True,
    provenance="quotient of the twisted strip metric, origin at distance r/2",
    region=((0, 1), (0, 2)),
    make_point=disk_point,
    specials=(ORIGIN,),
    kernel=_disk_twisted_kernel,
    meta=dict(_DISK_META),
)
