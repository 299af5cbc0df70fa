"""Metrics on the strip X = (0, 1] x R.

``d_strip`` is the piecewise metric that is uniform in the second
coordinate: with the points ordered so that ``x1 >= y1``,

    d = max(x1 - y1, |x2 - y2|)   if both gaps are at most x1 / 2
    d = x1 / 2                    otherwise.

``d_strip_twisted`` evaluates ``d_strip`` after the shear
``(x1, x2) -> (x1, x2 + phi(x1))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .metric import AxiomReport, DomainError, MetricDescriptor, SampleConfig, merge_reports, run_chunks, sample_points


class StripPoint(NamedTuple):
    x1: object
    x2: object


def in_strip(p) -> bool:
    return 0 < p[0] <= 1


def d_strip(p, q):
    x1, x2 = p[0], p[1]
    y1, y2 = q[0], q[1]
    if y1 > x1:
        x1, x2, y1, y2 = y1, y2, x1, x2
    half = x1 / 2
    g1 = x1 - y1
    g2 = abs(x2 - y2)
    if g1 <= half and g2 <= half:
        return g1 if g1 >= g2 else g2
    return half


def _default_twist(t):
    return 1 - 1 / t


@dataclass(frozen=True)
class TwistFn:
    """Strictly increasing function on (0, 1] with value 0 at t = 1.

    The default is ``-1/t + 1``, which tends to minus infinity at 0.
    """

    func: Callable = _default_twist
    name: str = "1-1/t"

    def __call__(self, t):
        if not t > 0:
            raise DomainError((t,), f"twist {self.name}")
        return self.func(t)

    def array(self, t: np.ndarray) -> np.ndarray:
        return self.func(np.asarray(t, dtype=np.float64))


PHI = TwistFn()


def phi(t):
    return PHI(t)


def shear(p, tw: TwistFn = PHI):
    return (p[0], p[1] + tw(p[0]))


def d_strip_twisted(p, q, tw: TwistFn = PHI):
    return d_strip((p[0], p[1] + tw(p[0])), (q[0], q[1] + tw(q[0])))


def check_uniformity(desc: MetricDescriptor, shift, cfg: SampleConfig) -> AxiomReport:
    """Check ``d(p + (0, a), q + (0, a)) = d(p, q)`` on sampled pairs."""
    cmp = cfg.comparator()
    d = desc.dist

    def work(stream: int, n: int) -> AxiomReport:
        rng = cfg.rng(stream, salt=3)
        pts = sample_points(desc, cfg, 2 * n, rng)
        rep = AxiomReport(name=f"{desc.name}:uniformity")
        for k in range(n):
            p, q = pts[2 * k], pts[2 * k + 1]
            ps, qs = (p[0], p[1] + shift), (q[0], q[1] + shift)
            lhs, rhs = d(ps, qs), d(p, q)
            rep.tick("uniformity", cmp.eq(lhs, rhs), (p, q), lhs, rhs)
        return rep

    return merge_reports(f"{desc.name}:uniformity", run_chunks(work, cfg.chunks(), cfg.workers))


def _outside(x1):
    return ~((x1 > 0.0) & (x1 <= 1.0))


def _strip_kernel(base, x1, x2):
    x1 = np.asarray(x1, dtype=np.float64)
    v = kernels.strip_field(x1, x2, float(base[0]), float(base[1]))
    return np.where(_outside(x1), np.nan, v)


def _twisted_kernel(base, x1, x2, tw: TwistFn = PHI):
    b1 = float(base[0])
    x1 = np.asarray(x1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t2 = np.asarray(x2, dtype=np.float64) + tw.array(x1)
    v = kernels.strip_field(x1, t2, b1, float(base[1]) + float(tw(b1)))
    return np.where(_outside(x1), np.nan, v)


STRIP_DX = MetricDescriptor(
    name="strip.dX",
    dist=d_strip,
    domain=in_strip,
    exact_capable=True,
    provenance="piecewise strip metric, uniform in x2",
    region=((0, 1), (-2, 2)),
    kernel=_strip_kernel,
)

STRIP_DX_TWISTED = MetricDescriptor(
    name="strip.dX_twisted",
    dist=d_strip_twisted,
    domain=in_strip,
    exact_capable=True,
    provenance="strip metric after the shear x2 -> x2 + phi(x1)",
    region=((0, 1), (-2, 2)),
    kernel=_twisted_kernel,
)
