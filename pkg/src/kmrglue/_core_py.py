"""Pure numpy versions of the compiled kernels in ``_core.pyx``."""

import numpy as np


def mean_curvature_grid(P, hu, hv):
    """Mean curvature of a gridded parametric surface by central differences."""
    P = np.asarray(P, dtype=float)
    c = P[1:-1, 1:-1]
    xu = (P[1:-1, 2:] - P[1:-1, :-2]) / (2 * hu)
    xv = (P[2:, 1:-1] - P[:-2, 1:-1]) / (2 * hv)
    xuu = (P[1:-1, 2:] - 2 * c + P[1:-1, :-2]) / hu**2
    xvv = (P[2:, 1:-1] - 2 * c + P[:-2, 1:-1]) / hv**2
    xuv = (P[2:, 2:] - P[2:, :-2] - P[:-2, 2:] + P[:-2, :-2]) / (4 * hu * hv)
    n = np.cross(xu, xv)
    n /= np.linalg.norm(n, axis=-1, keepdims=True)
    E = np.sum(xu * xu, -1)
    F = np.sum(xu * xv, -1)
    G = np.sum(xv * xv, -1)
    e = np.sum(xuu * n, -1)
    f = np.sum(xuv * n, -1)
    g = np.sum(xvv * n, -1)
    return (e * G - 2 * f * F + g * E) / (2 * (E * G - F * F))


def tridiag_solve_batched(a, b, c, d):
    """Thomas algorithm, vectorized over the batch axis."""
    a, b, c, d = (np.asarray(t, dtype=float) for t in (a, b, c, d))
    m, n = b.shape
    cp = np.empty((m, n))
    dp = np.empty((m, n))
    cp[:, 0] = c[:, 0] / b[:, 0]
    dp[:, 0] = d[:, 0] / b[:, 0]
    for i in range(1, n):
        w = b[:, i] - a[:, i] * cp[:, i - 1]
        cp[:, i] = c[:, i] / w
        dp[:, i] = (d[:, i] - a[:, i] * dp[:, i - 1]) / w
    x = np.empty((m, n))
    x[:, -1] = dp[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = dp[:, i] - cp[:, i] * x[:, i + 1]
    return x
