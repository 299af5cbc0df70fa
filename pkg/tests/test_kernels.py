import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sametric import kernels

needs_numba = pytest.mark.skipif(kernels.numba is None, reason="numba not installed")


@needs_numba
def test_strip_and_disk_fields_bit_identical():
    rng = np.random.default_rng(3)
    r, a = rng.uniform(0, 1, (64, 64)), rng.uniform(-4, 4, (64, 64))
    r[0, :5] = 0.0
    a[1, 0] = np.nan
    for base in [(0.5, 0.25), (1.0, -1.5), (0.0, 0.0)]:
        assert np.array_equal(kernels.strip_field_numpy(r, a, *base), kernels.strip_field_numba(r, a, *base),
                              equal_nan=True)
        assert np.array_equal(kernels.disk_field_numpy(r, a, *base), kernels.disk_field_numba(r, a, *base),
                              equal_nan=True)


@needs_numba
@pytest.mark.parametrize("level", [0.05, 0.2, 0.3])
def test_march_bit_identical(level):
    xs, ys = np.linspace(0, 1, 40), np.linspace(-1, 1, 50)
    X, Y = np.meshgrid(xs, ys)
    V = kernels.strip_field_numpy(X, Y, 0.6, 0.1)
    V[V > 0.29] = np.nan
    c1, i1 = kernels.march_numpy(V, xs, ys, level)
    c2, i2 = kernels.march_numba(V, xs, ys, level)
    assert np.array_equal(c1, c2) and np.array_equal(i1, i2)


int_mats = st.integers(2, 9).flatmap(lambda n: st.lists(st.integers(0, 6), min_size=n * n, max_size=n * n)
                                     .map(lambda v: np.array(v).reshape(n, n)))


@needs_numba
@given(int_mats)
@settings(max_examples=50, deadline=None)
def test_triangle_count_backends_agree(D):
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0)
    assert kernels.triangle_count_numpy(D) == kernels.triangle_count_numba(D)


def test_triangle_count_reference():
    D = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    count, (i, j, k) = kernels.triangle_count(D)
    assert count == 2 and D[i, k] > D[i, j] + D[j, k]
    assert kernels.triangle_count(np.array([[0, 1], [1, 0]])) == (0, (-1, -1, -1))


def test_env_flag_selects_numpy():
    env = dict(os.environ, **{kernels.ENV_FLAG: "1"})
    out = subprocess.run([sys.executable, "-c", "from sametric import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_benchmark_runs_and_reports_equal_outputs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--repeat", "1", "--size", "32"]) == 0
    rows = capsys.readouterr().out.splitlines()[2:]
    assert len(rows) == 4 and all(r.endswith("True") for r in rows)
