"""Distance fields on grids, level-set extraction and rendering.

Grids are node-based: ``values[j, i]`` is the field at ``(xs[i], ys[j])``
and NaN marks nodes outside the metric's domain. Level curves come from
marching squares with linear interpolation along cell edges. A corner is
"above" when its value exceeds the level, and a saddle cell is split
according to the average of its four corners.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .metric import MetricDescriptor

SVG_VERSION = "1"


@dataclass
class Grid:
    region: tuple  # ((xlo, xhi), (ylo, yhi))
    nx: int
    ny: int
    values: np.ndarray  # shape (ny, nx)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(self.ny, self.nx)

    @property
    def xs(self) -> np.ndarray:
        (lo, hi), _ = self.region
        return np.linspace(lo, hi, self.nx)

    @property
    def ys(self) -> np.ndarray:
        _, (lo, hi) = self.region
        return np.linspace(lo, hi, self.ny)


def _float_region(region) -> tuple:
    return tuple((float(lo), float(hi)) for lo, hi in region)


def sample_grid(desc: MetricDescriptor, base, nx: int = 256, ny: int | None = None, region=None) -> Grid:
    """Evaluate ``x -> d(x, base)`` on an ``nx`` by ``ny`` node grid.

    Descriptors with a vectorised kernel are evaluated in one call;
    otherwise each node is evaluated through ``desc.dist`` and nodes
    outside the domain become NaN.
    """
    ny = nx if ny is None else ny
    region = _float_region(region or desc.meta.get("render_region", desc.region))
    (xlo, xhi), (ylo, yhi) = region
    xs, ys = np.linspace(xlo, xhi, nx), np.linspace(ylo, yhi, ny)
    X, Y = np.meshgrid(xs, ys)
    if desc.kernel is not None:
        V = np.asarray(desc.kernel(base, X, Y), dtype=np.float64)
    else:
        V = np.full((ny, nx), np.nan)
        for j in range(ny):
            for i in range(nx):
                p = desc.make_point(X[j, i], Y[j, i]) if desc.make_point is not tuple else (X[j, i], Y[j, i])
                if desc.domain(p):
                    V[j, i] = float(desc.dist(p, base))
    return Grid(region, nx, ny, V)


@dataclass
class LevelPolyline:
    value: float
    vertices: list
    closed: bool = False

    @property
    def length(self) -> float:
        v = np.asarray(self.vertices)
        return float(np.hypot(*np.diff(v, axis=0).T).sum()) if len(v) > 1 else 0.0


def _chain(coords: np.ndarray, ids: np.ndarray, value: float) -> list[LevelPolyline]:
    """Join segments that share an edge id into polylines.

    Neighbouring cells interpolate a shared edge from the same two corners,
    so a crossing point is identified by its edge id alone.
    """
    pos: dict[int, tuple] = {}
    touching = defaultdict(list)
    for s, (a, b) in enumerate(ids.tolist()):
        pos[a] = (float(coords[s, 0]), float(coords[s, 1]))
        pos[b] = (float(coords[s, 2]), float(coords[s, 3]))
        touching[a].append(s)
        touching[b].append(s)
    used = [False] * len(ids)

    def extend(eid: int) -> list[int]:
        trail = []
        while True:
            nxt = next((t for t in touching[eid] if not used[t]), None)
            if nxt is None:
                return trail
            used[nxt] = True
            a, b = int(ids[nxt, 0]), int(ids[nxt, 1])
            eid = b if a == eid else a
            trail.append(eid)

    out = []
    for s in range(len(ids)):
        if used[s]:
            continue
        used[s] = True
        a, b = int(ids[s, 0]), int(ids[s, 1])
        chain = [a, b] + extend(b)
        if chain[-1] != a:
            chain = extend(a)[::-1] + chain
        closed = len(chain) > 3 and chain[0] == chain[-1]
        out.append(LevelPolyline(float(value), [pos[e] for e in chain], closed))
    return out


def marching_squares(g: Grid, value: float) -> list[LevelPolyline]:
    coords, ids = kernels.march(g.values, g.xs, g.ys, float(value))
    return _chain(coords, ids, value)


SLOPE_CLASSES = ("vertical", "+45", "-45", "other")


def slope_classify(polys: Sequence[LevelPolyline], tol_deg: float = 2.0) -> dict:
    """Length-weighted fractions of segment directions in each slope class."""
    totals = dict.fromkeys(SLOPE_CLASSES, 0.0)
    for pl in polys:
        v = np.asarray(pl.vertices, dtype=np.float64)
        if len(v) < 2:
            continue
        d = np.diff(v, axis=0)
        ln = np.hypot(d[:, 0], d[:, 1])
        ang = np.degrees(np.arctan2(d[:, 1], d[:, 0])) % 180.0  # direction, 0 <= ang < 180
        for cls, centre in (("vertical", 90.0), ("+45", 45.0), ("-45", 135.0)):
            m = np.abs(ang - centre) <= tol_deg
            totals[cls] += float(ln[m].sum())
            ln = np.where(m, 0.0, ln)
        totals["other"] += float(ln.sum())
    whole = sum(totals.values())
    if whole == 0.0:
        return dict.fromkeys(SLOPE_CLASSES, 0.0)
    return {k: v / whole for k, v in totals.items()}


def plateau_detect(g: Grid, value: float, tol: float) -> float:
    """Fraction of in-domain nodes whose value is within ``tol`` of ``value``."""
    V = g.values
    ok = ~np.isnan(V)
    n = int(ok.sum())
    if n == 0:
        return 0.0
    return float((np.abs(V[ok] - value) <= tol).sum()) / n


def radial_spread(polys: Sequence[LevelPolyline], center=(0.0, 0.0)) -> float:
    """``(max r - min r) / mean r`` over all polyline vertices."""
    v = np.concatenate([np.asarray(p.vertices) for p in polys]) if polys else np.empty((0, 2))
    if len(v) == 0:
        return 0.0
    r = np.hypot(v[:, 0] - center[0], v[:, 1] - center[1])
    return float((r.max() - r.min()) / r.mean())


# --------------------------------------------------------------------------
# output


@dataclass(frozen=True)
class SvgSpec:
    region: tuple = ((0.0, 1.0), (-1.0, 1.0))
    size: int = 512
    title: str = ""
    stroke: float = 1.0
    palette: tuple = ("#1f4e9c", "#b2182b", "#1b7837", "#762a83", "#e08214", "#35978f")


def _num(x: float) -> str:
    return f"{x:.3f}"


def emit_svg(polys: Sequence[LevelPolyline], spec: SvgSpec = SvgSpec(), path=None) -> str:
    """Render polylines into a square SVG with a y-up coordinate convention."""
    (xlo, xhi), (ylo, yhi) = _float_region(spec.region)
    S = spec.size
    sx, sy = S / (xhi - xlo), S / (yhi - ylo)

    def X(x):
        return (x - xlo) * sx

    def Y(y):
        return S - (y - ylo) * sy

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(f"<!-- sametric levelset svg v{SVG_VERSION}: y axis points up; region "
               f"[{xlo!r}, {xhi!r}] x [{ylo!r}, {yhi!r}] mapped onto a {S}px square viewBox -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{S}" height="{S}" '
               f'viewBox="0 0 {S} {S}">')
    if spec.title:
        out.append(f"<title>{spec.title}</title>")
    out.append(f'<rect x="0" y="0" width="{S}" height="{S}" fill="white" stroke="black" stroke-width="1"/>')
    if xlo <= 0.0 <= xhi:
        out.append(f'<line class="axis" x1="{_num(X(0.0))}" y1="0" x2="{_num(X(0.0))}" y2="{S}" stroke="#999" stroke-width="0.5"/>')
    if ylo <= 0.0 <= yhi:
        out.append(f'<line class="axis" x1="0" y1="{_num(Y(0.0))}" x2="{S}" y2="{_num(Y(0.0))}" stroke="#999" stroke-width="0.5"/>')
    levels = sorted({p.value for p in polys})
    colour = {v: spec.palette[k % len(spec.palette)] for k, v in enumerate(levels)}
    for p in polys:
        pts = " ".join(f"{_num(X(x))},{_num(Y(y))}" for x, y in p.vertices)
        tag = "polygon" if p.closed else "polyline"
        out.append(f'<{tag} data-level="{p.value!r}" points="{pts}" fill="none" stroke="{colour[p.value]}" '
                   f'stroke-width="{spec.stroke}"/>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def emit_csv(g: Grid, path=None) -> str:
    """Grid as ``x,y,value`` rows in row-major order, floats written with ``repr``."""
    (xlo, xhi), (ylo, yhi) = g.region
    buf = io.StringIO()
    buf.write(f"# region={xlo!r},{xhi!r},{ylo!r},{yhi!r} nx={g.nx} ny={g.ny}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "value"])
    xs, ys = g.xs, g.ys
    for j in range(g.ny):
        for i in range(g.nx):
            w.writerow([repr(float(xs[i])), repr(float(ys[j])), repr(float(g.values[j, i]))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_grid_csv(text: str) -> Grid:
    lines = text.splitlines()
    head = lines[0].lstrip("# ").split()
    meta = dict(item.split("=", 1) for item in head)
    xlo, xhi, ylo, yhi = (float(v) for v in meta["region"].split(","))
    nx, ny = int(meta["nx"]), int(meta["ny"])
    rows = list(csv.reader(lines[2:]))
    vals = np.array([float(r[2]) for r in rows], dtype=np.float64)
    return Grid(((xlo, xhi), (ylo, yhi)), nx, ny, vals.reshape(ny, nx))
