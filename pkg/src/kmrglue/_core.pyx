# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: grid mean curvature and batched tridiagonal solves."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def mean_curvature_grid(double[:, :, ::1] P, double hu, double hv):
    """Mean curvature of a gridded parametric surface by central differences.

    ``P`` has shape ``(nv, nu, 3)``; the result has shape ``(nv - 2, nu - 2)``.
    """
    cdef Py_ssize_t nv = P.shape[0], nu = P.shape[1]
    cdef Py_ssize_t i, j, k
    out = np.empty((nv - 2, nu - 2))
    cdef double[:, ::1] H = out
    cdef double xu[3]
    cdef double xv[3]
    cdef double xuu[3]
    cdef double xvv[3]
    cdef double xuv[3]
    cdef double n[3]
    cdef double E, F, G, e, f, g, nn, den
    for i in range(1, nv - 1):
        for j in range(1, nu - 1):
            for k in range(3):
                xu[k] = (P[i, j + 1, k] - P[i, j - 1, k]) / (2.0 * hu)
                xv[k] = (P[i + 1, j, k] - P[i - 1, j, k]) / (2.0 * hv)
                xuu[k] = (P[i, j + 1, k] - 2.0 * P[i, j, k] + P[i, j - 1, k]) / (hu * hu)
                xvv[k] = (P[i + 1, j, k] - 2.0 * P[i, j, k] + P[i - 1, j, k]) / (hv * hv)
                xuv[k] = (P[i + 1, j + 1, k] - P[i + 1, j - 1, k]
                          - P[i - 1, j + 1, k] + P[i - 1, j - 1, k]) / (4.0 * hu * hv)
            n[0] = xu[1] * xv[2] - xu[2] * xv[1]
            n[1] = xu[2] * xv[0] - xu[0] * xv[2]
            n[2] = xu[0] * xv[1] - xu[1] * xv[0]
            nn = sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2])
            E = xu[0] * xu[0] + xu[1] * xu[1] + xu[2] * xu[2]
            F = xu[0] * xv[0] + xu[1] * xv[1] + xu[2] * xv[2]
            G = xv[0] * xv[0] + xv[1] * xv[1] + xv[2] * xv[2]
            e = (xuu[0] * n[0] + xuu[1] * n[1] + xuu[2] * n[2]) / nn
            f = (xuv[0] * n[0] + xuv[1] * n[1] + xuv[2] * n[2]) / nn
            g = (xvv[0] * n[0] + xvv[1] * n[1] + xvv[2] * n[2]) / nn
            den = 2.0 * (E * G - F * F)
            H[i - 1, j - 1] = (e * G - 2.0 * f * F + g * E) / den
    return out


def tridiag_solve_batched(double[:, ::1] a, double[:, ::1] b, double[:, ::1] c, double[:, ::1] d):
    """Thomas algorithm for a batch of tridiagonal systems.

    Row ``k`` solves ``a[k, i] x[i-1] + b[k, i] x[i] + c[k, i] x[i+1] = d[k, i]``.
    """
    cdef Py_ssize_t m = b.shape[0], n = b.shape[1]
    cdef Py_ssize_t k, i
    out = np.empty((m, n))
    cdef double[:, ::1] x = out
    cdef double[::1] cp = np.empty(n)
    cdef double[::1] dp = np.empty(n)
    cdef double w
    for k in range(m):
        cp[0] = c[k, 0] / b[k, 0]
        dp[0] = d[k, 0] / b[k, 0]
        for i in range(1, n):
            w = b[k, i] - a[k, i] * cp[i - 1]
            cp[i] = c[k, i] / w
            dp[i] = (d[k, i] - a[k, i] * dp[i - 1]) / w
        x[k, n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            x[k, i] = dp[i] - cp[i] * x[k, i + 1]
    return out
