"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--size N]

Both backends are imported in one process; the first numba call of each
kernel is excluded from the timings as compilation warm-up. Outputs are
compared for bit equality before any timing is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sametric import kernels


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases(size: int):
    rng = np.random.default_rng(0)
    x1, x2 = rng.uniform(0, 1, (size, size)), rng.uniform(-2, 2, (size, size))
    xs, ys = np.linspace(0, 1, size), np.linspace(-1, 1, size)
    X, Y = np.meshgrid(xs, ys)
    V = kernels.strip_field_numpy(X, Y, 0.5, 0.0)
    n = max(64, size // 2)
    D = rng.integers(1, 8, (n, n))
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0)
    return {
        "strip_field": ((x1, x2, 0.5, 0.1), kernels.strip_field_numpy, kernels.strip_field_numba),
        "disk_field": ((x1, x2, 0.6, 0.3), kernels.disk_field_numpy, kernels.disk_field_numba),
        "march": ((V, xs, ys, 0.125), kernels.march_numpy, kernels.march_numba),
        "triangle_count": ((D,), kernels.triangle_count_numpy, kernels.triangle_count_numba),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b, equal_nan=True)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args(argv)
    if kernels.numba is None:
        print("numba is not installed; only the numpy backend is available")
        return 1
    print(f"active backend: {kernels.BACKEND}; grid {args.size}x{args.size}; best of {args.repeat}")
    print(f"{'kernel':<16}{'numpy [s]':>12}{'numba [s]':>12}{'speed-up':>10}  equal")
    for name, (inp, f_np, f_nb) in cases(args.size).items():
        ref, got = f_np(*inp), f_nb(*inp)  # also compiles the numba path
        t_np = _best(lambda: f_np(*inp), args.repeat)
        t_nb = _best(lambda: f_nb(*inp), args.repeat)
        print(f"{name:<16}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>10.1f}  {_same(ref, got)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
