"""Test-bed metrics with analytically known behaviour at the boundary.

``sigma``
    ``d = |x - x'| + |sigma(x) - sigma(x')|`` with ``sigma(x) = x2 / |x|`` on
    ``(0, 1] x [-1, 1]``. Along the line ``(t, c t)`` the value of ``sigma``
    tends to ``c / sqrt(1 + c^2)``, so ``(0, 0)`` is the only bad boundary
    point; after blowing it up the boundary arc point at angle ``alpha``
    carries ``sigma = sin(alpha)``.

``annulus`` / ``annulus_strip``
    ``d = |psi0^-1 x - psi0^-1 x'|`` with the radial blow-up ``psi0`` of the
    origin of radius 1/4, on the punctured unit disk or on the strip. Rays
    in directions ``u``, ``v`` from the origin end at distance ``|u - v| / 4``,
    and pulling back by the matching blow-up gives the Euclidean metric.

``euclid_strip``, ``euclid_square``, ``euclid_line``
    Controls whose metric already extends to the closure.

``broken``
    ``dist(p, q) = p1 - q1``; fails symmetry and positivity on purpose.
"""

from __future__ import annotations

import math

from .holeblowup import HoleBlowUp
from .metric import MetricDescriptor, euclidean
from .scalar import rational

STRIP_BOX = ((0, 1), (-1, 1))
ANNULUS_EPS = rational(1) / 4


def in_closed_strip_box(p) -> bool:
    return 0 < p[0] <= 1 and -1 <= p[1] <= 1


def sigma(p) -> float:
    x1, x2 = float(p[0]), float(p[1])
    return x2 / math.hypot(x1, x2)


def d_sigma(p, q) -> float:
    return euclidean(p, q) + abs(sigma(p) - sigma(q))


SIGMA = MetricDescriptor(
    name="fixture.sigma",
    dist=d_sigma,
    domain=in_closed_strip_box,
    exact_capable=False,
    provenance="Euclidean distance plus the jump of the direction coordinate x2/|x|",
    region=STRIP_BOX,
)

ANNULUS_PSI0 = HoleBlowUp.point((0.0, 0.0), float(ANNULUS_EPS))


def _unblow(p):
    return ANNULUS_PSI0.inverse((float(p[0]), float(p[1])))


def d_annulus(p, q) -> float:
    return euclidean(_unblow(p), _unblow(q))


def in_punctured_disk(p) -> bool:
    r2 = p[0] * p[0] + p[1] * p[1]
    return 0 < r2 <= 1


ANNULUS = MetricDescriptor(
    name="fixture.annulus",
    dist=d_annulus,
    domain=in_punctured_disk,
    exact_capable=False,
    provenance="Euclidean distance on the annulus read through the radial blow-up of radius 1/4",
    region=((-1, 1), (-1, 1)),
    meta={"eps": ANNULUS_EPS},
)

ANNULUS_STRIP = MetricDescriptor(
    name="fixture.annulus_strip",
    dist=d_annulus,
    domain=in_closed_strip_box,
    exact_capable=False,
    provenance="the annulus metric restricted to the strip box",
    region=STRIP_BOX,
    meta={"eps": ANNULUS_EPS},
)

EUCLID_STRIP = MetricDescriptor(
    name="fixture.euclid_strip",
    dist=euclidean,
    domain=in_closed_strip_box,
    exact_capable=False,
    provenance="Euclidean distance",
    region=STRIP_BOX,
)

EUCLID_SQUARE = MetricDescriptor(
    name="fixture.euclid_square",
    dist=euclidean,
    domain=lambda p: 0 <= p[0] <= 1 and 0 <= p[1] <= 1,
    exact_capable=False,
    provenance="Euclidean distance",
    region=((0, 1), (0, 1)),
)

EUCLID_LINE = MetricDescriptor(
    name="fixture.euclid_line",
    dist=lambda p, q: abs(p[0] - q[0]),
    domain=lambda p: True,
    exact_capable=True,
    provenance="absolute difference on the real line",
    region=((-1, 1),),
)


def _broken(p, q):
    return p[0] - q[0]


BROKEN = MetricDescriptor(
    name="fixture.broken",
    dist=_broken,
    domain=lambda p: 0 <= p[0] <= 1 and 0 <= p[1] <= 1,
    exact_capable=True,
    provenance="signed coordinate difference, not a metric",
    region=((0, 1), (0, 1)),
)

ALL = (SIGMA, ANNULUS, ANNULUS_STRIP, EUCLID_STRIP, EUCLID_SQUARE, EUCLID_LINE, BROKEN)
