"""Vectorised float kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and the environment variable
``SAMETRIC_DISABLE_NUMBA`` is unset (or ``0``). Both paths perform the
same IEEE operations in the same order, so their outputs agree bit for
bit; ``tests/test_kernels.py`` holds them to that.

Kernels:

* ``strip_field``     strip metric from every grid node to one base point
* ``disk_field``      disk quotient metric, strip coordinates (r, half-turns)
* ``march``           marching-squares segments of one level
* ``triangle_count``  exact min-plus triangle check on an integer matrix
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "SAMETRIC_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("", "0", "false", "no")


USE_NUMBA = numba is not None and numba_requested()


# --------------------------------------------------------------------------
# pure numpy


def _strip_np(x1, x2, b1, b2):
    big = np.maximum(x1, b1)
    g1 = big - np.minimum(x1, b1)
    g2 = np.abs(x2 - b2)
    half = big / 2.0
    return np.where((g1 <= half) & (g2 <= half), np.maximum(g1, g2), half)


def strip_field_numpy(x1, x2, b1, b2):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    return _strip_np(x1, x2, float(b1), float(b2))


def disk_field_numpy(r, a, br, ba):
    r = np.asarray(r, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    br, ba = float(br), float(ba)
    n0 = np.ceil((a - ba) / 2.0 - 0.5)
    best = np.full(r.shape, np.inf)
    for k in (-1.0, 0.0, 1.0):
        best = np.minimum(best, _strip_np(r, a, br, ba + 2.0 * (n0 + k)))
    if br == 0.0:
        best = r / 2.0
    else:
        best = np.where(r == 0.0, br / 2.0, best)
    return np.where(np.isnan(r) | np.isnan(a), np.nan, best)


# corner offsets (di_a, dj_a, di_b, dj_b) per edge: 0 bottom, 1 right, 2 top, 3 left
_EDGE_OFF = np.array([[0, 0, 1, 0], [1, 0, 1, 1], [0, 1, 1, 1], [0, 0, 0, 1]])


def march_numpy(V, xs, ys, level):
    V = np.asarray(V, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    ny, nx = V.shape
    v0, v1 = V[:-1, :-1], V[:-1, 1:]
    v2, v3 = V[1:, 1:], V[1:, :-1]
    valid = ~(np.isnan(v0) | np.isnan(v1) | np.isnan(v2) | np.isnan(v3))
    a0, a1, a2, a3 = v0 > level, v1 > level, v2 > level, v3 > level
    cross = np.stack([a0 != a1, a1 != a2, a3 != a2, a0 != a3]) & valid
    ncross = cross.sum(axis=0)
    jj, ii = np.meshgrid(np.arange(ny - 1), np.arange(nx - 1), indexing="ij")

    def edge_point(e, j, i):
        ja, ia = j + _EDGE_OFF[e, 1], i + _EDGE_OFF[e, 0]
        jb, ib = j + _EDGE_OFF[e, 3], i + _EDGE_OFF[e, 2]
        xa, ya, xb, yb = xs[ia], ys[ja], xs[ib], ys[jb]
        va, vb = V[ja, ia], V[jb, ib]
        t = (level - va) / (vb - va)
        vertical = (e == 1) | (e == 3)
        eid = np.where(vertical, ny * nx + ja * nx + ia, ja * nx + ia)
        return xa + t * (xb - xa), ya + t * (yb - ya), eid

    rows = []
    # ordinary cells: one segment joining the two crossed edges
    sel = ncross == 2
    j, i = jj[sel], ii[sel]
    c = cross[:, sel]
    first = np.argmax(c, axis=0)
    second = 3 - np.argmax(c[::-1], axis=0)
    rows.append((j * (nx - 1) + i, np.zeros_like(j), first, second, j, i))
    # saddles: split by the centre average
    sel = ncross == 4
    j, i = jj[sel], ii[sel]
    centre = (v0[sel] + v1[sel] + v2[sel] + v3[sel]) / 4.0 > level
    iso_odd = centre == a0[sel]  # isolate corners 1 and 3
    cell = j * (nx - 1) + i
    e_a1 = np.where(iso_odd, 0, 3)
    e_b1 = np.where(iso_odd, 1, 0)
    e_a2 = np.where(iso_odd, 2, 1)
    e_b2 = np.where(iso_odd, 3, 2)
    rows.append((cell, np.zeros_like(j), e_a1, e_b1, j, i))
    rows.append((cell, np.ones_like(j), e_a2, e_b2, j, i))

    cells = np.concatenate([r[0] for r in rows])
    slots = np.concatenate([r[1] for r in rows])
    ea = np.concatenate([r[2] for r in rows])
    eb = np.concatenate([r[3] for r in rows])
    J = np.concatenate([r[4] for r in rows])
    I = np.concatenate([r[5] for r in rows])
    order = np.lexsort((slots, cells))
    ea, eb, J, I = ea[order], eb[order], J[order], I[order]
    xa, ya, ida = edge_point(ea, J, I)
    xb, yb, idb = edge_point(eb, J, I)
    coords = np.stack([xa, ya, xb, yb], axis=1) if len(J) else np.empty((0, 4))
    ids = np.stack([ida, idb], axis=1).astype(np.int64) if len(J) else np.empty((0, 2), np.int64)
    return coords, ids


def triangle_count_numpy(D):
    D = np.asarray(D, dtype=np.int64)
    n = D.shape[0]
    count = 0
    first = (-1, -1, -1)
    for i in range(n):
        via = (D[i][:, None] + D).min(axis=0)
        bad = D[i] > via
        nb = int(bad.sum())
        if nb and count == 0:
            k = int(np.argmax(bad))
            j = int(np.argmin(D[i] + D[:, k]))
            first = (i, j, k)
        count += nb
    return count, first


# --------------------------------------------------------------------------
# numba

if numba is not None:
    njit = numba.njit(cache=False, nogil=True)

    @njit
    def _strip_scalar(x1, x2, b1, b2):
        big = max(x1, b1)
        g1 = big - min(x1, b1)
        g2 = abs(x2 - b2)
        half = big / 2.0
        if g1 <= half and g2 <= half:
            return max(g1, g2)
        return half

    @njit
    def _strip_loop(x1, x2, b1, b2):
        out = np.empty(x1.size)
        for k in range(x1.size):
            out[k] = _strip_scalar(x1[k], x2[k], b1, b2)
        return out

    @njit
    def _disk_loop(r, a, br, ba):
        out = np.empty(r.size)
        for k in range(r.size):
            rk, ak = r[k], a[k]
            if np.isnan(rk) or np.isnan(ak):
                out[k] = np.nan
            elif br == 0.0:
                out[k] = rk / 2.0
            elif rk == 0.0:
                out[k] = br / 2.0
            else:
                n0 = np.ceil((ak - ba) / 2.0 - 0.5)
                best = np.inf
                for s in (-1.0, 0.0, 1.0):
                    best = min(best, _strip_scalar(rk, ak, br, ba + 2.0 * (n0 + s)))
                out[k] = best
        return out

    @njit
    def _edge_point(e, j, i, V, xs, ys, level, nx, ny):
        if e == 0:
            xa, ya, xb, yb, va, vb = xs[i], ys[j], xs[i + 1], ys[j], V[j, i], V[j, i + 1]
            eid = j * nx + i
        elif e == 1:
            xa, ya, xb, yb, va, vb = xs[i + 1], ys[j], xs[i + 1], ys[j + 1], V[j, i + 1], V[j + 1, i + 1]
            eid = ny * nx + j * nx + i + 1
        elif e == 2:
            xa, ya, xb, yb, va, vb = xs[i], ys[j + 1], xs[i + 1], ys[j + 1], V[j + 1, i], V[j + 1, i + 1]
            eid = (j + 1) * nx + i
        else:
            xa, ya, xb, yb, va, vb = xs[i], ys[j], xs[i], ys[j + 1], V[j, i], V[j + 1, i]
            eid = ny * nx + j * nx + i
        t = (level - va) / (vb - va)
        return xa + t * (xb - xa), ya + t * (yb - ya), eid

    @njit
    def _march_loop(V, xs, ys, level):
        ny, nx = V.shape
        cap = 2 * (nx - 1) * (ny - 1)
        coords = np.empty((cap, 4))
        ids = np.empty((cap, 2), np.int64)
        m = 0
        cr = np.zeros(4, np.bool_)
        for j in range(ny - 1):
            for i in range(nx - 1):
                v0, v1, v2, v3 = V[j, i], V[j, i + 1], V[j + 1, i + 1], V[j + 1, i]
                if np.isnan(v0) or np.isnan(v1) or np.isnan(v2) or np.isnan(v3):
                    continue
                a0, a1, a2, a3 = v0 > level, v1 > level, v2 > level, v3 > level
                cr[0], cr[1], cr[2], cr[3] = a0 != a1, a1 != a2, a3 != a2, a0 != a3
                n = cr[0] + cr[1] + cr[2] + cr[3]
                if n == 2:
                    first = -1
                    second = -1
                    for e in range(4):
                        if cr[e]:
                            if first < 0:
                                first = e
                            else:
                                second = e
                    pairs = ((first, second), (-1, -1))
                    npairs = 1
                elif n == 4:
                    centre = (v0 + v1 + v2 + v3) / 4.0 > level
                    if centre == a0:
                        pairs = ((0, 1), (2, 3))
                    else:
                        pairs = ((3, 0), (1, 2))
                    npairs = 2
                else:
                    continue
                for s in range(npairs):
                    ea, eb = pairs[s]
                    xa, ya, ida = _edge_point(ea, j, i, V, xs, ys, level, nx, ny)
                    xb, yb, idb = _edge_point(eb, j, i, V, xs, ys, level, nx, ny)
                    coords[m, 0], coords[m, 1], coords[m, 2], coords[m, 3] = xa, ya, xb, yb
                    ids[m, 0], ids[m, 1] = ida, idb
                    m += 1
        return coords[:m], ids[:m]

    @njit
    def _triangle_loop(D):
        n = D.shape[0]
        count = 0
        fi, fj, fk = -1, -1, -1
        for i in range(n):
            for k in range(n):
                best = D[i, 0] + D[0, k]
                arg = 0
                for j in range(1, n):
                    v = D[i, j] + D[j, k]
                    if v < best:
                        best = v
                        arg = j
                if D[i, k] > best:
                    count += 1
                    if fi < 0:
                        fi, fj, fk = i, arg, k
        return count, (fi, fj, fk)

    def strip_field_numba(x1, x2, b1, b2):
        x1 = np.asarray(x1, dtype=np.float64)
        x2 = np.broadcast_to(np.asarray(x2, dtype=np.float64), x1.shape)
        out = _strip_loop(np.ascontiguousarray(x1).ravel(), np.ascontiguousarray(x2).ravel(), float(b1), float(b2))
        return out.reshape(x1.shape)

    def disk_field_numba(r, a, br, ba):
        r = np.asarray(r, dtype=np.float64)
        a = np.broadcast_to(np.asarray(a, dtype=np.float64), r.shape)
        out = _disk_loop(np.ascontiguousarray(r).ravel(), np.ascontiguousarray(a).ravel(), float(br), float(ba))
        return out.reshape(r.shape)

    def march_numba(V, xs, ys, level):
        return _march_loop(
            np.ascontiguousarray(V, dtype=np.float64),
            np.ascontiguousarray(xs, dtype=np.float64),
            np.ascontiguousarray(ys, dtype=np.float64),
            float(level),
        )

    def triangle_count_numba(D):
        count, first = _triangle_loop(np.ascontiguousarray(D, dtype=np.int64))
        return int(count), tuple(int(v) for v in first)

else:  # pragma: no cover
    strip_field_numba = disk_field_numba = march_numba = triangle_count_numba = None


if USE_NUMBA:
    strip_field = strip_field_numba
    disk_field = disk_field_numba
    march = march_numba
    triangle_count = triangle_count_numba
else:
    strip_field = strip_field_numpy
    disk_field = disk_field_numpy
    march = march_numpy
    triangle_count = triangle_count_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
