"""Isometries from the twisted disk metric to the untwisted one.

For a boundary point ``b0 = (1, x0)`` the strip map
``(x1, x2) -> (x1, x0 + phi(x1) + x2)`` commutes with the deck shift and
descends to a disk map fixing the origin. It carries ``d_disk_twisted``
onto ``d_disk``. Radial segments are sent to spirals that turn around the
origin ``|phi(x1)|`` half-turns, an unbounded amount as ``x1 -> 0``.

The partner isometry composes with the reflection ``a -> 2 x0 - a`` of
the disk across the axis through ``b0``.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .disk import DISK_D, DiskPoint, d_disk, d_disk_twisted, disk_point, lift, project, to_cartesian
from .metric import AxiomReport, MetricDescriptor, SampleConfig, merge_reports, run_chunks, sample_points
from .scalar import Mode, fmt_point, rational
from .strip import PHI, TwistFn


@dataclass(frozen=True)
class IsometryWitness:
    """Boundary base point ``b0`` together with the twist and orientation."""

    b0: DiskPoint
    tw: TwistFn = PHI
    reflect: bool = False

    def __post_init__(self):
        if self.b0[0] != 1:
            raise ValueError(f"b0 must lie on the boundary circle, got r={self.b0[0]}")
        object.__setattr__(self, "b0", disk_point(self.b0[0], self.b0[1]))

    @property
    def x0(self):
        return self.b0[1]


def phi_strip_map(w: IsometryWitness, p) -> tuple:
    x1, x2 = p[0], p[1]
    if w.reflect:
        return (x1, w.x0 - w.tw(x1) - x2)
    return (x1, w.x0 + w.tw(x1) + x2)


def phi_disk_map(w: IsometryWitness, b) -> DiskPoint:
    if b[0] == 0:
        return DiskPoint(b[0], 0 * b[0])
    return project(phi_strip_map(w, lift(b)))


def verify_isometry(w: IsometryWitness, cfg: SampleConfig) -> AxiomReport:
    """Check ``d(Phi b, Phi c) = d_twisted(b, c)`` on sampled disk pairs.

    Alongside the distance identity each sample also checks that the map
    preserves radii, that it does not depend on the chosen lift, and that
    the strip map commutes with the deck shift.
    """
    cmp = cfg.comparator()
    name = f"isometry:b0={w.b0[1]}"

    def work(stream: int, n: int) -> AxiomReport:
        rng = cfg.rng(stream, salt=5)
        pts = sample_points(DISK_D, cfg, 2 * n, rng)
        rep = AxiomReport(name=name)
        for k in range(n):
            b, c = pts[2 * k], pts[2 * k + 1]
            pb, pc = phi_disk_map(w, b), phi_disk_map(w, c)
            lhs, rhs = d_disk(pb, pc), d_disk_twisted(b, c, w.tw)
            rep.tick("isometry", cmp.eq(lhs, rhs), (b, c), lhs, rhs)
            rep.tick("radius", pb[0] == b[0], (b,), pb[0], b[0])
            if b[0] != 0:
                alt = project(phi_strip_map(w, lift(b, 1)))
                rep.tick("lift_independence", alt == pb, (b,), alt, pb)
                p = lift(b)
                img, img2 = phi_strip_map(w, p), phi_strip_map(w, lift(b, 1))
                rep.tick("deck_shift", cmp.eq(abs(img2[1] - img[1]), 2), (b,), img2, img)
        return rep

    return merge_reports(name, run_chunks(work, cfg.chunks(), cfg.workers))


def boundary_grid(den: int = 8) -> list[DiskPoint]:
    """Rational boundary points ``(1, k/den)`` for ``k = 0 .. 2 den - 1``."""
    return [DiskPoint(rational(1), rational(k) / den) for k in range(2 * den)]


# --------------------------------------------------------------------------
# winding


@dataclass(frozen=True)
class WindingSample:
    x1: float
    half_turns_analytic: float
    half_turns_accumulated: float


def _angle(w: IsometryWitness, s: float) -> float:
    # image of the radius (s, 0); its Cartesian angle is pi * (x0 + phi(s))
    x, y = to_cartesian(phi_strip_map(w, (s, 0.0)))
    return math.atan2(y, x)


def _wrap(d: float) -> float:
    return (d + math.pi) % (2.0 * math.pi) - math.pi


def winding_profile(w: IsometryWitness, x1_list: Sequence, max_step: float = math.pi / 4,
                    ds0: float = 1.0 / 64) -> list[WindingSample]:
    """Half-turns swept by the image of the radius ``(s, 0)``, ``s`` in ``(0, 1]``.

    The image point at parameter ``s`` is traced from ``s = 1``
    down to each requested ``x1`` by summing wrapped ``atan2`` increments.
    A step is accepted only when it and both of its halves turn by at most
    ``max_step`` and the halves add up to the whole, which rules out
    hidden full turns. Values are unsigned.
    """
    targets = sorted({float(x) for x in x1_list}, reverse=True)
    for t in targets:
        if not 0 < t <= 1:
            raise ValueError(f"x1={t} outside (0, 1]")
    results: dict[float, float] = {}
    s, total, ds = 1.0, 0.0, ds0
    ang = _angle(w, s)
    for target in targets:
        while s > target:
            s_new = max(s - ds, target)
            mid = 0.5 * (s + s_new)
            a_new = _angle(w, s_new)
            a_mid = _angle(w, mid)
            inc = _wrap(a_new - ang)
            h1, h2 = _wrap(a_mid - ang), _wrap(a_new - a_mid)
            if abs(inc) > max_step or abs(h1) > max_step or abs(h2) > max_step or abs(h1 + h2 - inc) > 1e-9:
                ds *= 0.5
                continue
            total += inc
            s, ang = s_new, a_new
            ds *= 1.5
        results[target] = abs(total) / math.pi
    out = []
    for x in x1_list:
        xf = float(x)
        out.append(WindingSample(xf, float(abs(w.tw(x))), results[xf]))
    return out


def winding_csv(samples: Sequence[WindingSample]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x1", "half_turns_analytic", "half_turns_accumulated"])
    for s in samples:
        wr.writerow([repr(s.x1), repr(s.half_turns_analytic), repr(s.half_turns_accumulated)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# landmark fingerprints


def landmark_fingerprint(desc: MetricDescriptor, landmarks: Sequence) -> Callable:
    """Map a point to its vector of distances to ``landmarks``."""
    marks = tuple(landmarks)

    def fingerprint(p) -> tuple:
        return tuple(desc.dist(p, m) for m in marks)

    return fingerprint


def generic_boundary_landmarks(k: int = 3, seed: int = 0, den: int = 2**20) -> list[DiskPoint]:
    """``k`` seeded boundary points with distinct rational angles."""
    rng = np.random.default_rng([seed, 7])
    nums = rng.choice(2 * den, size=k, replace=False)
    return [DiskPoint(rational(1), rational(int(n)) / den) for n in sorted(nums)]


@dataclass
class FingerprintReport:
    n_points: int
    n_landmarks: int
    collisions: list = field(default_factory=list)  # groups of distinct points sharing a fingerprint
    n_colliding_pairs: int = 0

    @property
    def injective(self) -> bool:
        return self.n_colliding_pairs == 0

    def to_csv(self, max_groups: int = 100) -> str:
        buf = io.StringIO()
        buf.write(f"# points={self.n_points} landmarks={self.n_landmarks}\n")
        buf.write(f"# colliding_pairs={self.n_colliding_pairs} groups={len(self.collisions)}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["group", "point", "fingerprint"])
        for g, (fp, pts) in enumerate(self.collisions[:max_groups]):
            for p in pts:
                wr.writerow([g, fmt_point(p), fmt_point(fp)])
        return buf.getvalue()


def injectivity_check(desc: MetricDescriptor, landmarks: Sequence, cfg: SampleConfig) -> FingerprintReport:
    """Sample ``cfg.count`` distinct points and group equal fingerprints."""
    fp = landmark_fingerprint(desc, landmarks)
    rng = cfg.rng(0, salt=8)
    seen: set = set()
    pts: list = []
    while len(pts) < cfg.count:
        for p in sample_points(desc, cfg, cfg.count - len(pts), rng):
            if p not in seen:
                seen.add(p)
                pts.append(p)
    groups: dict = defaultdict(list)
    if Mode(cfg.mode) is Mode.EXACT:
        for p in pts:
            groups[fp(p)].append(p)
    else:
        # bucket by rounding to the tolerance grid
        scale = 1.0 / cfg.tol
        for p in pts:
            groups[tuple(round(float(v) * scale) for v in fp(p))].append(p)
    rep = FingerprintReport(n_points=len(pts), n_landmarks=len(landmarks))
    for key in sorted(groups, key=lambda k: tuple(float(v) for v in k)):
        g = groups[key]
        if len(g) > 1:
            rep.collisions.append((key, g))
            rep.n_colliding_pairs += len(g) * (len(g) - 1) // 2
    return rep
