"""Compactification of metrics on the strip ``(0, 1] x [-1, 1]``.

The pipeline finds the bad points on the edge ``x1 = 0``, optionally
reparametrises the first coordinate by an estimated gauge, blows up the
bad points, pulls the metric back and probes its limits on the new
boundary. When every probe converges, the result carries an extended
metric defined on the closed blown-up domain.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .badpoints import BAD_THRESHOLD, Curve, Gauge, default_family, detect_bad, estimate_gauge, gauge_samples
from .holeblowup import (DEFAULT_APPROACH, LOCAL, RADIAL, BoundaryPoint, ExtensionReport, HoleBlowUp, approach_curves,
                         dyadic_t_list, extension_probe, hole_boundary, pullback_metric)
from .metric import MetricDescriptor, run_chunks

T_EVAL = 2.0**-40


class NonFiniteBadSet(ValueError):
    """The detected bad set does not look finite at the scan resolution."""


def gauge_reparam(desc: MetricDescriptor, g: Gauge) -> MetricDescriptor:
    """Metric in coordinates ``(s, x) = (r(t), x)``, ``r`` the bridged gauge."""
    top = g.interp(1.0)

    def back(p):
        return (g.interp_inverse(float(p[0])),) + tuple(p[1:])

    def dist(p, q):
        return desc.dist(back(p), back(q))

    def domain(p) -> bool:
        return 0 < p[0] <= top and bool(desc.domain(back(p)))

    region = ((0, top),) + tuple(desc.region[1:])
    return MetricDescriptor(
        name=f"{desc.name}@gauge",
        dist=dist,
        domain=domain,
        exact_capable=False,
        provenance=f"{desc.name} with first coordinate replaced by the gauge value",
        region=region,
        meta={"base": desc, "gauge": g, "to_base": back, "from_base": lambda p: (g.interp(float(p[0])),) + tuple(p[1:])},
    )


def _bad_at(desc, x2, family_fn, t_list) -> tuple[bool, float]:
    rep = detect_bad(desc, (0.0, x2), family_fn((0.0, x2)), t_list)
    return rep.bad, rep.limit


def _runs(flags: Sequence[bool]) -> list[tuple[int, int]]:
    out, start = [], None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        if not f and start is not None:
            out.append((start, i - 1))
            start = None
    if start is not None:
        out.append((start, len(flags) - 1))
    return out


def detect_boundary_bad_set(desc: MetricDescriptor, resolution: float = 1 / 64,
                            family_fn: Callable = default_family, t_list=None, refine: int = 64,
                            workers: int = 1) -> list[tuple]:
    """Bad points on the edge ``x1 = 0`` of a strip descriptor.

    The edge is scanned at ``resolution``; each run of flagged grid points
    is rescanned at ``resolution / refine`` over the run widened by one
    coarse step, and every flagged fine run contributes the point with the
    largest witness limit (ties go to the middle of the run). A fine run
    longer than one coarse step means a bad set of positive length, which
    the finite-centre pipeline cannot handle.
    """
    t_list = list(t_list) if t_list is not None else dyadic_t_list()
    lo, hi = (float(v) for v in desc.region[1])
    n = int(round((hi - lo) / resolution))
    grid = [lo + k * resolution for k in range(n + 1)]

    def scan(xs):
        res = run_chunks(lambda k, _n: _bad_at(desc, xs[k], family_fn, t_list), [(k, 1) for k in range(len(xs))], workers)
        return [r[0] for r in res], [r[1] for r in res]

    flags, _ = scan(grid)
    found = []
    fine_step = resolution / refine
    for a, b in _runs(flags):
        start, stop = grid[a] - resolution, grid[b] + resolution
        m = int(round((stop - start) / fine_step))
        fine = [x for x in (start + k * fine_step for k in range(m + 1)) if lo <= x <= hi]
        fflags, flims = scan(fine)
        for fa, fb in _runs(fflags):
            if fb - fa + 1 > refine:
                raise NonFiniteBadSet(
                    f"bad points fill [{fine[fa]!r}, {fine[fb]!r}]; the bad set is not finite at this resolution")
            mid = 0.5 * (fa + fb)
            best = max(range(fa, fb + 1), key=lambda k: (flims[k], -abs(k - mid)))
            found.append((0.0, fine[best]))
    found = sorted(set(found), key=lambda p: p[1])
    return found


@dataclass
class CompactifyOptions:
    eps: float = 1 / 8
    resolution: float = 1 / 64
    use_gauge: bool = False
    n_arc: int = 128
    edge_step: float = 1 / 16
    t_list: Sequence[float] | None = None
    family_fn: Callable = default_family
    approach: Sequence[float] = DEFAULT_APPROACH
    workers: int = 1


def _arc_params(n_arc: int) -> list[float]:
    # n_arc intervals, both ends included
    return [(-0.5 + k / n_arc) * math.pi for k in range(n_arc + 1)]


def _push_inward(p, chain: Sequence[HoleBlowUp], t: float = T_EVAL):
    """Move a closure point off the new boundary into the interior."""
    x1, x2 = float(p[0]), float(p[1])
    d1, d2 = 0.0, 0.0
    if x1 == 0.0:
        d1 += 1.0
    for h in chain:
        for part in h.parts:
            c1, c2 = float(part.center[0]), float(part.center[1])
            r = math.hypot(x1 - c1, x2 - c2)
            if r <= float(part.eps) * (1 + 1e-12):
                d1 += (x1 - c1) / r
                d2 += (x2 - c2) / r
    if d1 == 0.0 and d2 == 0.0:
        return p
    nrm = math.hypot(d1, d2)
    return (x1 + t * d1 / nrm, x2 + t * d2 / nrm)


def extended_descriptor(pulled: MetricDescriptor, chain: Sequence[HoleBlowUp], boundary: Sequence[BoundaryPoint],
                        name: str) -> MetricDescriptor:
    """Closure metric: boundary points are evaluated a distance ``T_EVAL`` inside."""

    def dist(p, q):
        if p == q:
            return 0.0
        return pulled.dist(_push_inward(p, chain), _push_inward(q, chain))

    def domain(p) -> bool:
        if pulled.domain(p):
            return True
        pp = _push_inward(p, chain)
        return pp != p and bool(pulled.domain(pp))

    return MetricDescriptor(
        name=name,
        dist=dist,
        domain=domain,
        exact_capable=False,
        provenance=f"continuous extension of {pulled.name} to the new boundary",
        region=pulled.region,
        specials=tuple(b.point for b in boundary),
        meta={"pulled": pulled, "chain": tuple(chain)},
    )


@dataclass
class CompactificationResult:
    input: MetricDescriptor
    gauge: Gauge | None
    chain: list
    pulled: MetricDescriptor
    extended: MetricDescriptor | None
    bad_set: list
    verdict: str
    report: ExtensionReport | None
    arc_index: list = field(default_factory=list)  # boundary indices of the arc of hole 0
    notes: list = field(default_factory=list)
    diagnostic: str = ""

    def arc_matrix(self, hole: int = 0) -> np.ndarray:
        idx = [i for i, b in enumerate(self.report.boundary) if b.label == f"hole{hole}"]
        return self.report.matrix[np.ix_(idx, idx)]

    def arc_params(self, hole: int = 0) -> list[float]:
        return [b.param for b in self.report.boundary if b.label == f"hole{hole}"]

    def save(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        meta = [
            f"input={self.input.name}",
            f"extended={self.extended.name if self.extended else ''}",
            f"verdict={self.verdict}",
            f"bad_set={' '.join(f'{p[0]!r};{p[1]!r}' for p in self.bad_set)}",
            f"gauge={self.gauge.name if self.gauge else 'none'}",
            f"boundary_points={len(self.report.boundary) if self.report else 0}",
            f"t_eval={T_EVAL!r}",
        ]
        meta += [f"note={n}" for n in self.notes]
        (out / "metadata.txt").write_text("\n".join(meta) + "\n")
        (out / "chain.txt").write_text("\n\n".join(h.describe() for h in self.chain) + ("\n" if self.chain else ""))
        (out / "verdict.txt").write_text(self.verdict + ("\n" + self.diagnostic if self.diagnostic else "") + "\n")
        if self.report is not None:
            (out / "boundary_matrix.csv").write_text(self.report.matrix_csv())
            (out / "extension.csv").write_text(self.report.to_csv())
        if self.gauge is not None:
            (out / "gauge.csv").write_text(self.gauge.to_csv())
        return out


def _boundary_points(desc: MetricDescriptor, chain: Sequence[HoleBlowUp], opts: CompactifyOptions,
                     t_list) -> list[BoundaryPoint]:
    pts: list[BoundaryPoint] = []
    arcs = _arc_params(opts.n_arc)
    for h in chain:
        for k in range(len(h.parts)):
            pts.extend(hole_boundary(h, arcs, k))
    lo, hi = (float(v) for v in desc.region[1])
    n = int(round((hi - lo) / opts.edge_step))
    for j in range(n + 1):
        x2 = lo + j * opts.edge_step
        pts.append(BoundaryPoint("edge", x2, (0.0, x2), (1.0, 0.0)))
    return [b for b in pts if approach_curves(desc, b, t_list, opts.approach)]


def compactify_strip(desc: MetricDescriptor, options: CompactifyOptions | None = None) -> CompactificationResult:
    """Detect, blow up, pull back and extend; see the module docstring."""
    opts = options or CompactifyOptions()
    t_list = list(opts.t_list) if opts.t_list is not None else dyadic_t_list()
    notes: list[str] = []
    bad = detect_boundary_bad_set(desc, opts.resolution, opts.family_fn, t_list, workers=opts.workers)

    gauge = None
    work = desc
    if opts.use_gauge and bad:
        samples = []
        for p in bad:
            rep = detect_bad(desc, p, opts.family_fn(p), t_list)
            samples += gauge_samples(desc, rep, t_list, BAD_THRESHOLD)
        gauge = estimate_gauge(samples, BAD_THRESHOLD)
        work = gauge_reparam(desc, gauge)
        notes.append("first coordinate reparametrised by the estimated gauge")

    chain: list[HoleBlowUp] = []
    if bad:
        eps = opts.eps
        if len(bad) == 1:
            h = HoleBlowUp.point(bad[0], eps, RADIAL)
        else:
            while True:
                try:
                    h = HoleBlowUp.finite(bad, eps, LOCAL)
                    break
                except ValueError:
                    eps /= 2
            if eps != opts.eps:
                notes.append(f"eps reduced to {eps!r} to separate the centres")
        chain.append(h)
        pulled = pullback_metric(work, h)
    else:
        pulled = work

    boundary = _boundary_points(pulled, chain, opts, t_list)
    report = extension_probe(pulled, chain[0] if chain else None, boundary, opts.approach, t_list,
                             workers=opts.workers)
    extended = None
    diagnostic = ""
    if report.verdict == "extends":
        extended = extended_descriptor(pulled, chain, report.boundary, f"{desc.name}@compact")
    elif report.worst_same_point is not None:
        i, th, lim, osc = report.worst_same_point
        b = report.boundary[i]
        diagnostic = (f"boundary point {b.label} param={b.param!r} at {b.point!r}: rays at 0 and {th!r} "
                      f"end {lim!r} apart (tail oscillation {osc!r})")
    return CompactificationResult(desc, gauge, chain, pulled, extended, bad, report.verdict, report,
                                  notes=notes, diagnostic=diagnostic)


def default_out_dir() -> Path:
    return Path(os.environ.get("SAMETRIC_OUT", "sametric_out"))
