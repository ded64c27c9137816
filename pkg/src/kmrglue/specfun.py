"""Elliptic integrals of the first kind and l=1 associated Legendre functions.

The elliptic parameter follows the ``m`` convention,
``K(m) = int_0^{pi/2} (1 - m sin^2 u)^{-1/2} du``.
"""

import math

import numpy as np
from scipy.special import elliprf

from .errors import DomainError

__all__ = [
    "complete_K",
    "incomplete_F",
    "legendre_P1",
    "legendre_Q1",
    "legendre_Q1_derivatives",
    "agm",
]


def agm(a, b, tol=1e-16, maxiter=64):
    """Arithmetic-geometric mean of positive numbers (array aware)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for _ in range(maxiter):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= tol * np.abs(a)):
            break
    return 0.5 * (a + b)


def _K_unchecked(m):
    return np.pi / (2.0 * agm(1.0, np.sqrt(1.0 - np.asarray(m, dtype=float))))


def complete_K(m):
    """Complete elliptic integral of the first kind.

    Parameters
    ----------
    m : float or array_like
        Elliptic parameter, ``0 <= m < 1``.

    Returns
    -------
    float or ndarray
        ``K(m)`` computed by the arithmetic-geometric mean.
    """
    arr = np.asarray(m, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"complete_K requires 0 <= m < 1, got {m!r}")
    out = _K_unchecked(arr)
    return float(out) if out.ndim == 0 else out


def incomplete_F(y, m):
    """Incomplete elliptic integral ``F(y, m) = int_0^y (1 - m sin^2 t)^{-1/2} dt``.

    Valid for every ``m < 1`` including negative parameters. The argument is
    reduced to ``|y| <= pi/2`` with ``F(y + k pi) = F(y) + 2 k K(m)`` and the
    remainder is evaluated through Carlson's symmetric integral.
    """
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr >= 1.0) or np.any(~np.isfinite(m_arr)):
        raise DomainError(f"incomplete_F requires m < 1, got {m!r}")
    y_arr = np.asarray(y, dtype=float)
    k = np.round(y_arr / np.pi)
    r = y_arr - k * np.pi
    s = np.sin(r)
    c = np.cos(r)
    part = s * elliprf(c * c, 1.0 - m_arr * s * s, 1.0)
    out = part + 2.0 * k * _K_unchecked(m_arr)
    return float(out) if out.ndim == 0 else out


def legendre_P1(j, t):
    """Associated Legendre function of the first kind, degree 1."""
    if j < 0:
        raise DomainError("order j must be non-negative")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise DomainError("P_1^j requires |t| <= 1")
    if j == 0:
        out = t.copy()
    elif j == 1:
        out = -np.sqrt(1.0 - t * t)
    else:
        out = np.zeros_like(t)
    return float(out) if out.ndim == 0 else out


def _q0_derivative(n, t):
    """n-th derivative of Q_1^0 in t, closed form."""
    if n == 0:
        return 0.5 * t * np.log((1.0 + t) / (1.0 - t)) - 1.0
    if n == 1:
        return 0.5 * np.log((1.0 + t) / (1.0 - t)) + t / (1.0 - t * t)
    # Q'' = 2/(1-t^2)^2 = 1/2 [ (1-t)^-2 + (1+t)^-2 + (1-t)^-1 + (1+t)^-1 ]
    k = n - 2
    out = np.zeros_like(t)
    for p in (1, 2):
        poch = math.prod(range(p, p + k)) if k > 0 else 1
        out = out + 0.5 * poch * ((1.0 - t) ** (-p - k) + (-1) ** k * (1.0 + t) ** (-p - k))
    return out


def legendre_Q1_derivatives(j, t):
    """Value and first two t-derivatives of ``Q_1^j(t)``.

    ``Q_1^j(t) = (-1)^j (1 - t^2)^{j/2} d^j/dt^j Q_1^0(t)``.

    Returns
    -------
    tuple of ndarray
        ``(Q, dQ/dt, d2Q/dt2)``.
    """
    if j < 0:
        raise DomainError("order j must be non-negative")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1.0):
        raise DomainError("Q_1^j requires |t| < 1")
    s = 1.0 - t * t
    d0, d1, d2 = (_q0_derivative(j + n, t) for n in range(3))
    sign = (-1.0) ** j
    h = j / 2.0
    # g = s^h, g' = -2 h t s^(h-1), g'' = -2h s^(h-1) + 4 h (h-1) t^2 s^(h-2)
    g = s**h
    g1 = -2.0 * h * t * s ** (h - 1.0) if j else np.zeros_like(t)
    g2 = (-2.0 * h * s ** (h - 1.0) + 4.0 * h * (h - 1.0) * t * t * s ** (h - 2.0)) if j else np.zeros_like(t)
    q = sign * g * d0
    q1 = sign * (g1 * d0 + g * d1)
    q2 = sign * (g2 * d0 + 2.0 * g1 * d1 + g * d2)
    return q, q1, q2


def legendre_Q1(j, t):
    """Associated Legendre function of the second kind, degree 1.

    Examples
    --------
    >>> round(legendre_Q1(0, 0.0), 12)
    -1.0
    """
    q = legendre_Q1_derivatives(j, t)[0]
    return float(q) if np.ndim(q) == 0 else q
