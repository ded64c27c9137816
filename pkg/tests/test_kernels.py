import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import solve_banded

from kmrglue import _core_py, kernels

core = pytest.importorskip("kmrglue._core")


def _sphere(n, R=2.0):
    u = np.linspace(0.3, 2.0, n)
    v = np.linspace(0.4, 1.4, n)
    U, V = np.meshgrid(u, v)
    P = np.stack([R * np.cos(U) * np.sin(V), R * np.sin(U) * np.sin(V), R * np.cos(V)], -1)
    return P, u[1] - u[0], v[1] - v[0]


def _system(m=5, n=50, seed=0):
    rng = np.random.default_rng(seed)
    a, c, d = rng.normal(size=(3, m, n))
    b = 4 + rng.random((m, n))
    a[:, 0] = 0
    c[:, -1] = 0
    return a, b, c, d


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_mean_curvature_backends_agree():
    P, hu, hv = _sphere(65)
    assert np.allclose(core.mean_curvature_grid(P, hu, hv), _core_py.mean_curvature_grid(P, hu, hv), atol=1e-12)


def test_mean_curvature_of_sphere():
    P, hu, hv = _sphere(201)
    H = kernels.mean_curvature_grid(P, hu, hv)
    assert np.allclose(np.abs(H), 0.5, atol=1e-4)


def test_tridiag_backends_agree_with_banded():
    a, b, c, d = _system()
    x1 = core.tridiag_solve_batched(a, b, c, d)
    x2 = _core_py.tridiag_solve_batched(a, b, c, d)
    assert np.allclose(x1, x2, atol=1e-13)
    for k in range(a.shape[0]):
        ab = np.vstack([np.r_[0, c[k, :-1]], b[k], np.r_[a[k, 1:], 0]])
        assert np.allclose(x1[k], solve_banded((1, 1), ab, d[k]), atol=1e-12)


def test_pure_python_switch():
    env = dict(os.environ, KMRGLUE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from kmrglue import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
