"""Hole-blow-up maps, pullback metrics and boundary extension probes.

A hole-blow-up at a point ``c`` removes the open ball of radius ``eps``
around ``c`` and collapses the new boundary circle onto ``c``. Two radial
profiles are available:

``radial``  ``psi(y) = c + (1 - eps/|y - c|)(y - c)``, so ``|psi(y) - c| = |y - c| - eps``
``local``   same contraction on ``[eps, 2 eps]``, a linear blend back to the
            identity on ``[2 eps, 3 eps]`` and the identity beyond ``3 eps``

Finite centre sets compose point blow-ups, innermost centre first. A
linear centre ``{c} x R^m`` acts radially on the leading coordinates only.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metric import DomainError, MetricDescriptor, run_chunks
from .scalar import fmt, is_exact, rational, sqrt

RADIAL = "radial"
LOCAL = "local"


def _norm(v):
    return sqrt(sum(x * x for x in v))


def _unify(v, n):
    # an irrational norm arrives as a float; keep the whole computation in floats then
    if isinstance(n, float):
        return [float(x) for x in v], n
    return list(v), n


def _forward_radius(s, eps, profile: str):
    if profile == RADIAL:
        return s - eps
    if s <= 2 * eps:
        return s - eps
    if s <= 3 * eps:
        return 2 * s - 3 * eps
    return s


def _inverse_radius(s, eps, profile: str):
    if profile == RADIAL:
        return s + eps
    if s <= eps:
        return s + eps
    if s <= 3 * eps:
        return (s + 3 * eps) / 2
    return s


@dataclass(frozen=True)
class PointBlowUp:
    """Blow-up of a single point ``center`` with radius ``eps``."""

    center: tuple
    eps: object
    profile: str = RADIAL

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.profile not in (RADIAL, LOCAL):
            raise ValueError(f"unknown profile {self.profile!r}")

    def forward(self, y):
        c = self.center
        v = [a - b for a, b in zip(y, c)]
        v, s = _unify(v, _norm(v))
        eps = float(self.eps) if isinstance(s, float) else self.eps
        if s < eps:
            raise DomainError(tuple(y), f"blow-up at {c} (|y - c| < eps)")
        rho = _forward_radius(s, eps, self.profile)
        if rho == s:
            return tuple(y)
        f = rho / s
        cc = [float(x) for x in c] if isinstance(s, float) else c
        return tuple(a + f * b for a, b in zip(cc, v))

    def inverse(self, p):
        c = self.center
        v = [a - b for a, b in zip(p, c)]
        v, s = _unify(v, _norm(v))
        if s == 0:
            raise DomainError(tuple(p), f"inverse blow-up at {c} (p is the centre)")
        eps = float(self.eps) if isinstance(s, float) else self.eps
        rho = _inverse_radius(s, eps, self.profile)
        if rho == s:
            return tuple(p)
        f = rho / s
        cc = [float(x) for x in c] if isinstance(s, float) else c
        return tuple(a + f * b for a, b in zip(cc, v))

    def in_domain(self, y) -> bool:
        return _norm([a - b for a, b in zip(y, self.center)]) >= self.eps

    def in_interior(self, y) -> bool:
        return _norm([a - b for a, b in zip(y, self.center)]) > self.eps


@dataclass(frozen=True)
class HoleBlowUp:
    """A point, finite-set or linear centre together with its radii.

    ``kind`` is ``"point"``, ``"finite"`` or ``"linear"``. For a linear
    centre the first ``lead_dims`` coordinates are blown up around
    ``centers[0]`` and the rest pass through unchanged.
    """

    kind: str
    centers: tuple
    eps: tuple
    ambient_dim: int = 2
    profile: str = RADIAL
    lead_dims: int | None = None
    parts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("point", "finite", "linear"):
            raise ValueError(f"unknown centre kind {self.kind!r}")
        if len(self.centers) != len(self.eps) or not self.centers:
            raise ValueError("need one eps per centre")
        if self.kind == "linear" and not (self.lead_dims and 1 <= self.lead_dims <= self.ambient_dim):
            raise ValueError("linear centre needs 1 <= lead_dims <= ambient_dim")
        parts = tuple(PointBlowUp(tuple(c), e, self.profile) for c, e in zip(self.centers, self.eps))
        object.__setattr__(self, "parts", parts)
        if self.kind == "finite":
            bad = self.nesting_violations()
            if bad:
                raise ValueError(f"nesting condition fails for centre pairs {bad}")

    @classmethod
    def point(cls, center, eps, profile: str = RADIAL) -> "HoleBlowUp":
        return cls("point", (tuple(center),), (eps,), len(center), profile)

    @classmethod
    def finite(cls, centers, eps, profile: str = LOCAL) -> "HoleBlowUp":
        centers = tuple(tuple(c) for c in centers)
        if not isinstance(eps, (list, tuple)):
            eps = (eps,) * len(centers)
        return cls("finite", centers, tuple(eps), len(centers[0]), profile)

    @classmethod
    def linear(cls, lead_dims: int, ambient_dim: int, eps, center=None) -> "HoleBlowUp":
        center = tuple(center) if center is not None else (rational(0),) * lead_dims
        return cls("linear", (center,), (eps,), ambient_dim, RADIAL, lead_dims)

    def nesting_violations(self) -> list:
        """Pairs ``(l, k)``, ``l < k``, whose ``3 eps_k`` ball meets hole ``l``."""
        out = []
        for k, pk in enumerate(self.parts):
            for l, pl in enumerate(self.parts[:k]):
                gap = _norm([a - b for a, b in zip(pk.center, pl.center)])
                if gap - 3 * pk.eps < pl.eps:
                    out.append((l, k))
        return out

    def forward(self, y):
        """``psi(y)``; raises ``DomainError`` when ``y`` lies in a removed ball."""
        if self.kind == "linear":
            m = self.lead_dims
            return self.parts[0].forward(tuple(y[:m])) + tuple(y[m:])
        out = tuple(y)
        for part in reversed(self.parts):
            out = part.forward(out)
        return out

    def inverse(self, p):
        if self.kind == "linear":
            m = self.lead_dims
            return self.parts[0].inverse(tuple(p[:m])) + tuple(p[m:])
        out = tuple(p)
        for part in self.parts:
            out = part.inverse(out)
        return out

    def in_interior(self, y) -> bool:
        """``y`` lies strictly outside every removed ball (checked along the composition)."""
        if self.kind == "linear":
            return self.parts[0].in_interior(tuple(y[: self.lead_dims]))
        cur = tuple(y)
        for part in reversed(self.parts):
            if not part.in_interior(cur):
                return False
            cur = part.forward(cur)
        return True

    def hole_boundary_point(self, index: int, alpha: float) -> tuple:
        """Point at angle ``alpha`` on the circle bounding hole ``index`` (2D)."""
        c, e = self.parts[index].center, float(self.parts[index].eps)
        return (float(c[0]) + e * math.cos(alpha), float(c[1]) + e * math.sin(alpha))

    def describe(self) -> str:
        lines = [f"kind={self.kind} profile={self.profile} ambient_dim={self.ambient_dim}"]
        if self.lead_dims is not None:
            lines.append(f"lead_dims={self.lead_dims}")
        for i, (c, e) in enumerate(zip(self.centers, self.eps)):
            lines.append(f"centre[{i}]=" + ";".join(fmt(x) for x in c) + f" eps={fmt(e)}")
        return "\n".join(lines)


def psi_forward(h: HoleBlowUp, y):
    return h.forward(y)


def psi_inverse(h: HoleBlowUp, p):
    return h.inverse(p)


def pullback_metric(desc: MetricDescriptor, h: HoleBlowUp, name: str | None = None) -> MetricDescriptor:
    """``d_psi(x, x') = d(psi x, psi x')`` on the interior of the blown-up domain."""

    def dist(p, q):
        return desc.dist(h.forward(p), h.forward(q))

    def domain(y) -> bool:
        if not h.in_interior(y):
            return False
        return bool(desc.domain(h.forward(y)))

    grow = max(float(e) for e in h.eps)
    region = tuple((lo - grow, hi + grow) for lo, hi in desc.region)
    return MetricDescriptor(
        name=name or f"{desc.name}@blowup",
        dist=dist,
        domain=domain,
        exact_capable=False,
        provenance=f"pullback of {desc.name} under a hole-blow-up",
        region=region,
        meta={"base": desc, "blowup": h},
    )


# --------------------------------------------------------------------------
# extension probe

DEFAULT_APPROACH = tuple(k * math.pi / 8 for k in (0, 1, -1, 2, -2, 3, -3))
EXTEND_TOL = 1e-3
FAIL_THRESHOLD = 1e-1


def dyadic_t_list(lo: int = 2, hi: int = 30) -> list[float]:
    """``[2^-lo, ..., 2^-hi]``, decreasing."""
    return [2.0**-i for i in range(lo, hi + 1)]


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the new boundary with a unit inward direction."""

    label: str
    param: float
    point: tuple
    inward: tuple


def hole_boundary(h: HoleBlowUp, alphas: Sequence[float], index: int = 0) -> list[BoundaryPoint]:
    out = []
    for a in alphas:
        q = h.hole_boundary_point(index, a)
        out.append(BoundaryPoint(f"hole{index}", float(a), q, (math.cos(a), math.sin(a))))
    return out


def _rotate(u, theta):
    c, s = math.cos(theta), math.sin(theta)
    return (c * u[0] - s * u[1], s * u[0] + c * u[1])


def approach_curves(desc: MetricDescriptor, b: BoundaryPoint, t_list, angles=DEFAULT_APPROACH) -> list:
    """Rays ``q + t R_theta(u)`` sampled on ``t_list``; rays leaving the domain are dropped."""
    curves = []
    for th in angles:
        d = _rotate(b.inward, th)
        pts = [(b.point[0] + t * d[0], b.point[1] + t * d[1]) for t in t_list]
        if all(desc.domain(p) for p in pts):
            curves.append((th, pts))
    return curves


def _tail(values: Sequence[float]) -> tuple[float, float]:
    """Final value and oscillation over the last quarter."""
    q = max(2, len(values) // 4)
    tail = values[-q:]
    return values[-1], max(tail) - min(tail)


@dataclass
class ExtensionReport:
    boundary: list
    t_tail: list
    matrix: np.ndarray
    residual: np.ndarray
    same_point: list  # (index, theta, limit, oscillation)
    verdict: str
    worst_same_point: tuple | None = None
    tail_values: dict = field(default_factory=dict, repr=False)
    tol: float = EXTEND_TOL
    fail_threshold: float = FAIL_THRESHOLD

    def matrix_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["param"] + [repr(b.param) for b in self.boundary])
        for b, row in zip(self.boundary, self.matrix):
            w.writerow([repr(b.param)] + [repr(float(x)) for x in row])
        return buf.getvalue()

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# verdict={self.verdict}\n")
        buf.write(f"# max_pair_residual={float(self.residual.max()) if self.residual.size else 0.0!r}\n")
        worst = max((abs(s[2]) for s in self.same_point), default=0.0)
        buf.write(f"# max_same_point_limit={worst!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "beta", "t", "estimate"])
        for (i, k), vals in sorted(self.tail_values.items()):
            for t, v in zip(self.t_tail, vals):
                w.writerow([repr(self.boundary[i].param), repr(self.boundary[k].param), repr(t), repr(v)])
        return buf.getvalue()


def extension_probe(desc_pulled: MetricDescriptor, h: HoleBlowUp | None, boundary_params, approach=DEFAULT_APPROACH,
                    t_list=None, tol: float = EXTEND_TOL, fail_threshold: float = FAIL_THRESHOLD,
                    workers: int = 1) -> ExtensionReport:
    """Estimate boundary limits of ``desc_pulled`` along approach rays.

    ``boundary_params`` is a list of ``BoundaryPoint`` or of angles on the
    first hole. Pair limits use the first admissible ray at each point;
    same-point limits compare every other ray with that one.
    """
    t_list = list(t_list) if t_list is not None else dyadic_t_list()
    if boundary_params and not isinstance(boundary_params[0], BoundaryPoint):
        boundary_params = hole_boundary(h, boundary_params)
    bpts = list(boundary_params)
    q = max(2, len(t_list) // 4)
    t_tail = t_list[-q:]
    d = desc_pulled.dist

    curves = [approach_curves(desc_pulled, b, t_list, approach) for b in bpts]
    for b, cs in zip(bpts, curves):
        if not cs:
            raise ValueError(f"no approach ray stays in the domain at boundary point {b}")

    same = []
    for i, cs in enumerate(curves):
        ref = cs[0][1]
        for th, pts in cs[1:]:
            vals = [d(a, b) for a, b in zip(ref, pts)]
            lim, osc = _tail(vals)
            same.append((i, th, lim, osc))

    m = len(bpts)
    tails = [cs[0][1][-q:] for cs in curves]

    def row(i: int, _n: int):
        out = []
        for k in range(i + 1, m):
            out.append((k, [d(a, b) for a, b in zip(tails[i], tails[k])]))
        return i, out

    matrix = np.zeros((m, m))
    residual = np.zeros((m, m))
    tail_values = {}
    for i, entries in run_chunks(row, [(i, 1) for i in range(m)], workers):
        for k, vals in entries:
            val, osc = vals[-1], max(vals) - min(vals)
            matrix[i, k] = matrix[k, i] = val
            residual[i, k] = residual[k, i] = osc
            tail_values[(i, k)] = vals

    worst = max(same, key=lambda s: abs(s[2]), default=None)
    same_ok = all(abs(s[2]) < tol and s[3] < tol for s in same)
    pair_ok = bool(residual.max() < tol) if m else True
    if same_ok and pair_ok:
        verdict = "extends"
    elif any(abs(s[2]) > fail_threshold and s[3] <= tol for s in same):
        verdict = "fails"
    else:
        verdict = "inconclusive"
    return ExtensionReport(bpts, t_tail, matrix, residual, same, verdict, worst, tail_values, tol, fail_threshold)
