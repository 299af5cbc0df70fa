"""Metric descriptors, seeded sampling and axiom verification."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .scalar import DEFAULT_TOL, Comparator, Mode, fmt, fmt_point, rational

Point = tuple
Box = tuple  # ((lo, hi), (lo, hi), ...)


class DomainError(ValueError):
    """A point was passed outside the domain of a map or metric."""

    def __init__(self, point, where: str = ""):
        self.point = point
        msg = f"point {point!r} is outside the domain"
        if where:
            msg += f" of {where}"
        super().__init__(msg)


@dataclass(frozen=True, eq=False)
class MetricDescriptor:
    """A named distance function together with its domain.

    ``region`` is the default sampling box in the coordinates accepted by
    ``make_point``; ``specials`` are distinguished points (the disk origin,
    say) that samplers mix into the stream. ``kernel`` is an optional
    vectorised float kernel ``kernel(base, X, Y) -> values`` used when
    evaluating the metric on a grid.
    """

    name: str
    dist: Callable[[Any, Any], Any]
    domain: Callable[[Any], bool]
    exact_capable: bool = True
    provenance: str = ""
    region: Box = ((0, 1), (-1, 1))
    make_point: Callable[..., Any] = tuple
    specials: tuple = ()
    kernel: Callable | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, p, q):
        return self.dist(p, q)


def eval_metric(desc: MetricDescriptor, p, q):
    for x in (p, q):
        if not desc.domain(x):
            raise DomainError(x, desc.name)
    return desc.dist(p, q)


@dataclass(frozen=True)
class SampleConfig:
    """Seeded sampling parameters.

    The stream is cut into fixed-size chunks, each drawn from its own
    generator keyed by ``(seed, chunk index)``; results therefore do not
    depend on ``workers``.
    """

    seed: int = 0
    count: int = 1000
    region: Box | None = None
    mode: Mode = Mode.EXACT
    tol: float | None = DEFAULT_TOL
    workers: int = 1
    chunk: int = 2048
    special_rate: float = 0.05
    coarse_rate: float = 0.3
    coarse_den: int = 16
    fine_den: int = 2**20

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))

    def comparator(self) -> Comparator:
        if self.mode is Mode.EXACT:
            return Comparator(Mode.EXACT)
        return Comparator(Mode.FLOAT, self.tol)

    def chunks(self, total: int | None = None) -> list[tuple[int, int]]:
        total = self.count if total is None else total
        out, start, idx = [], 0, 0
        while start < total:
            size = min(self.chunk, total - start)
            out.append((idx, size))
            start += size
            idx += 1
        return out

    def rng(self, stream: int, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt, stream])


def _coordinate(rng, lo, hi, cfg: SampleConfig):
    if cfg.mode is Mode.FLOAT:
        return float(rng.uniform(float(lo), float(hi)))
    den = cfg.coarse_den if rng.random() < cfg.coarse_rate else cfg.fine_den
    lo_q, hi_q = rational(lo), rational(hi)
    a = int(np.ceil(float(lo_q) * den))
    b = int(np.floor(float(hi_q) * den))
    num = int(rng.integers(a, b + 1))
    return rational(num) / den


def sample_points(desc: MetricDescriptor, cfg: SampleConfig, n: int, rng) -> list:
    """Draw ``n`` domain points; rejection-samples the configured box."""
    region = cfg.region if cfg.region is not None else desc.region
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 100 * n + 1000:
            raise RuntimeError(f"sampling region of {desc.name} barely meets its domain")
        if desc.specials and rng.random() < cfg.special_rate:
            out.append(desc.specials[int(rng.integers(len(desc.specials)))])
            continue
        coords = [_coordinate(rng, lo, hi, cfg) for lo, hi in region]
        p = desc.make_point(*coords) if desc.make_point is not tuple else tuple(coords)
        if desc.domain(p):
            out.append(p)
    return out


def run_chunks(fn: Callable[[int, int], Any], chunks: Sequence[tuple[int, int]], workers: int = 1) -> list:
    """Evaluate ``fn(stream, size)`` per chunk, preserving chunk order."""
    if workers <= 1 or len(chunks) <= 1:
        return [fn(i, n) for i, n in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


@dataclass
class Violation:
    axiom: str
    points: tuple
    lhs: Any
    rhs: Any


@dataclass
class AxiomReport:
    """Per-axiom instance counts and recorded violations."""

    name: str = ""
    checked: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)
    max_recorded: int = 1000
    n_violations: int = 0

    @property
    def ok(self) -> bool:
        return self.n_violations == 0

    def tick(self, axiom: str, passed: bool, points=(), lhs=None, rhs=None):
        self.checked[axiom] += 1
        if not passed:
            self.n_violations += 1
            if len(self.violations) < self.max_recorded:
                self.violations.append(Violation(axiom, tuple(points), lhs, rhs))

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        self.checked.update(other.checked)
        self.n_violations += other.n_violations
        room = self.max_recorded - len(self.violations)
        self.violations.extend(other.violations[: max(room, 0)])
        return self

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        buf.write(f"# report={self.name}\n")
        for axiom in sorted(self.checked):
            buf.write(f"# checked {axiom}={self.checked[axiom]}\n")
        buf.write(f"# violations={self.n_violations}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axiom", "p", "q", "r", "lhs", "rhs"])
        for v in self.violations:
            pts = [fmt_point(p) if isinstance(p, tuple) else str(p) for p in v.points]
            pts += [""] * (3 - len(pts))
            w.writerow([v.axiom, *pts[:3], _fmt_any(v.lhs), _fmt_any(v.rhs)])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def _fmt_any(x) -> str:
    if x is None:
        return ""
    if isinstance(x, tuple):
        return fmt_point(x)
    return fmt(x)


def merge_reports(name: str, parts: Sequence[AxiomReport]) -> AxiomReport:
    out = AxiomReport(name=name)
    for part in parts:
        out.merge(part)
    return out


def check_metric_axioms(desc: MetricDescriptor, cfg: SampleConfig) -> AxiomReport:
    """Sample ``cfg.count`` triples and test the metric axioms on each.

    Identity is checked as ``d(p, p) = 0``, positivity as ``d(p, q) > 0``
    for distinct sampled points, plus symmetry and all three triangle
    inequalities of the triple.
    """
    cmp = cfg.comparator()
    d = desc.dist

    def work(stream: int, n: int) -> AxiomReport:
        rng = cfg.rng(stream, salt=1)
        pts = sample_points(desc, cfg, 3 * n, rng)
        rep = AxiomReport(name=desc.name)
        for k in range(n):
            p, q, r = pts[3 * k], pts[3 * k + 1], pts[3 * k + 2]
            dpp = d(p, p)
            rep.tick("identity", cmp.eq(dpp, 0), (p,), dpp, 0)
            dpq, dqp = d(p, q), d(q, p)
            rep.tick("symmetry", cmp.eq(dpq, dqp), (p, q), dpq, dqp)
            dqr, dpr = d(q, r), d(p, r)
            for a, b, dab in ((p, q, dpq), (q, r, dqr), (p, r, dpr)):
                if a != b:
                    rep.tick("positivity", cmp.positive(dab), (a, b), dab, 0)
            rep.tick("triangle", cmp.le(dpr, dpq + dqr), (p, q, r), dpr, dpq + dqr)
            rep.tick("triangle", cmp.le(dpq, dpr + dqr), (p, r, q), dpq, dpr + dqr)
            rep.tick("triangle", cmp.le(dqr, dpq + dpr), (q, p, r), dqr, dpq + dpr)
        return rep

    return merge_reports(desc.name, run_chunks(work, cfg.chunks(), cfg.workers))


def check_boundedness(desc: MetricDescriptor, cfg: SampleConfig):
    """Largest distance over ``cfg.count`` sampled pairs."""

    def work(stream: int, n: int):
        rng = cfg.rng(stream, salt=2)
        pts = sample_points(desc, cfg, 2 * n, rng)
        return max(desc.dist(pts[2 * k], pts[2 * k + 1]) for k in range(n))

    return max(run_chunks(work, cfg.chunks(), cfg.workers))


def euclidean(p, q) -> float:
    return math.dist([float(a) for a in p], [float(b) for b in q])
