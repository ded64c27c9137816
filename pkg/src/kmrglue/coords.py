"""Sphero-conal coordinates, the branched map z(x, y) and the conformal (u, v) chart.

The chart is ``u(x) = int_0^x dt / l(t)`` and ``v(y) = int_{pi/2}^y dt / m(t)``.
Both integrals are incomplete elliptic integrals, so the chart is evaluated in
closed form and inverted with Jacobi amplitudes polished by Newton steps.
"""

from dataclasses import dataclass, field
import enum

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import ellipj

from .errors import DomainError
from .specfun import complete_K, incomplete_F, _K_unchecked

__all__ = [
    "Sheet",
    "SpheroConal",
    "ConformalChart",
    "l_factor",
    "m_factor",
    "k_factor",
    "sphere_map",
    "z_map",
    "sheet_of",
    "build_chart",
    "u_period",
    "v_period",
    "v_epsilon",
    "limit_v_of_y",
    "limit_y_of_v",
]


class Sheet(enum.IntEnum):
    """Sheet of the two-sheeted cover of the Riemann sphere."""

    ONE = 1
    TWO = 2


def _check_sigma(sigma):
    if not (0.0 < sigma < np.pi / 2):
        raise DomainError(f"sigma must lie in (0, pi/2), got {sigma!r}")


def l_factor(x, sigma):
    """``l(x) = sqrt(1 - sin^2(sigma) sin^2(x))``."""
    return np.sqrt(1.0 - np.sin(sigma) ** 2 * np.sin(x) ** 2)


def m_factor(y, sigma):
    """``m(y) = sqrt(1 - cos^2(sigma) cos^2(y))``."""
    return np.sqrt(1.0 - np.cos(sigma) ** 2 * np.cos(y) ** 2)


def k_factor(x, y, sigma):
    """``k = sin^2(sigma) cos^2(x) + cos^2(sigma) sin^2(y)``."""
    return np.sin(sigma) ** 2 * np.cos(x) ** 2 + np.cos(sigma) ** 2 * np.sin(y) ** 2


def sphere_map(x, y, sigma):
    """Point ``F(x, y)`` on the unit sphere, stacked on the last axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.stack(
        [np.cos(x) * np.sin(y), np.sin(x) * m_factor(y, sigma), l_factor(x, sigma) * np.cos(y)],
        axis=-1,
    )


def z_map(x, y, sigma):
    """Stereographic image ``z(x, y)`` of the sphero-conal point.

    Returns ``complex('inf')`` (entrywise) where the denominator vanishes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    num = np.cos(x) * np.sin(y) + 1j * np.sin(x) * m_factor(y, sigma)
    den = 1.0 - l_factor(x, sigma) * np.cos(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) > 1e-300, num / np.where(den == 0, 1.0, den), complex(np.inf, 0))
    return complex(out) if out.ndim == 0 else out


def z_derivative_x(x, y, sigma):
    """Exact partial derivative of ``z`` with respect to ``x``."""
    s2 = np.sin(sigma) ** 2
    lx = l_factor(x, sigma)
    my = m_factor(y, sigma)
    num = np.cos(x) * np.sin(y) + 1j * np.sin(x) * my
    dnum = -np.sin(x) * np.sin(y) + 1j * np.cos(x) * my
    den = 1.0 - lx * np.cos(y)
    dl = -s2 * np.sin(x) * np.cos(x) / lx
    dden = -dl * np.cos(y)
    return (dnum * den - num * dden) / den**2


def sheet_of(y):
    """Sheet tag of the sphero-conal ordinate ``y`` (period ``2 pi``)."""
    r = np.mod(np.asarray(y, dtype=float), 2 * np.pi)
    return np.where(r < np.pi, Sheet.ONE, Sheet.TWO)


@dataclass(frozen=True)
class SpheroConal:
    """A sphero-conal point ``(x, y)`` for cone parameter ``sigma``."""

    x: float
    y: float
    sigma: float

    def __post_init__(self):
        _check_sigma(self.sigma)

    @property
    def l(self):
        return float(l_factor(self.x, self.sigma))

    @property
    def m(self):
        return float(m_factor(self.y, self.sigma))

    @property
    def k(self):
        return float(k_factor(self.x, self.y, self.sigma))

    def z(self):
        return z_map(self.x, self.y, self.sigma)

    @property
    def sheet(self):
        return Sheet(int(sheet_of(self.y)))


def u_period(sigma):
    """``U_sigma = u(2 pi) = 4 K(sin^2 sigma)``."""
    return 4.0 * complete_K(np.sin(sigma) ** 2)


def v_period(sigma):
    """``V_sigma = v(2 pi) - v(0) = 4 K(cos^2 sigma)``."""
    return 4.0 * complete_K(np.cos(sigma) ** 2)


def _newton_invert(target, guess, forward, dforward, iters=4):
    t = guess
    for _ in range(iters):
        t = t - (forward(t) - target) * dforward(t)
    return t


@dataclass(frozen=True)
class ConformalChart:
    """Conformal cylinder chart ``(u, v)`` for cone parameter ``sigma``.

    Attributes
    ----------
    sigma : float
        Cone parameter.
    U_sigma, V_sigma : float
        Periods of ``u`` and ``v``.
    x_table, u_table, y_table, v_table : ndarray
        Monotone tables of the chart over one period (for plotting and quick
        interpolation; exact evaluation uses closed forms).
    """

    sigma: float
    U_sigma: float
    V_sigma: float
    x_table: np.ndarray = field(repr=False)
    u_table: np.ndarray = field(repr=False)
    y_table: np.ndarray = field(repr=False)
    v_table: np.ndarray = field(repr=False)

    # forward maps
    def u_of_x(self, x):
        return incomplete_F(x, np.sin(self.sigma) ** 2)

    def v_of_y(self, y):
        return incomplete_F(np.asarray(y) - np.pi / 2, np.cos(self.sigma) ** 2)

    # inverses
    def x_of_u(self, u):
        m = np.sin(self.sigma) ** 2
        u = np.asarray(u, dtype=float)
        guess = ellipj(u, m)[3]
        out = _newton_invert(u, guess, self.u_of_x, lambda t: l_factor(t, self.sigma))
        return float(out) if np.ndim(out) == 0 else out

    def y_of_v(self, v):
        m = np.cos(self.sigma) ** 2
        v = np.asarray(v, dtype=float)
        guess = np.pi / 2 + ellipj(v, m)[3]
        out = _newton_invert(v, guess, self.v_of_y, lambda t: m_factor(t, self.sigma))
        return float(out) if np.ndim(out) == 0 else out

    def z_of(self, u, v):
        """``z`` at chart point ``(u, v)``."""
        return z_map(self.x_of_u(u), self.y_of_v(v), self.sigma)

    def dz_dzeta(self, u, v):
        """Complex derivative ``dz / d(u + i v)`` (``z`` is holomorphic in the chart)."""
        x = self.x_of_u(u)
        y = self.y_of_v(v)
        return z_derivative_x(x, y, self.sigma) * l_factor(x, self.sigma)

    def sheet(self, v):
        return sheet_of(self.y_of_v(v))

    def interpolate_u(self, x):
        """Monotone cubic interpolation of ``u(x)`` from the stored table."""
        return PchipInterpolator(self.x_table, self.u_table)(np.mod(x, 2 * np.pi))


def build_chart(sigma, resolution=1024):
    """Tabulate the conformal chart for cone parameter ``sigma``.

    Parameters
    ----------
    sigma : float
        Cone parameter in ``(0, pi/2)``.
    resolution : int
        Number of table samples per period.
    """
    _check_sigma(sigma)
    if resolution < 8:
        raise DomainError("resolution must be at least 8")
    xs = np.linspace(0.0, 2 * np.pi, resolution + 1)
    ys = np.linspace(0.0, 2 * np.pi, resolution + 1)
    us = incomplete_F(xs, np.sin(sigma) ** 2)
    vs = incomplete_F(ys - np.pi / 2, np.cos(sigma) ** 2)
    return ConformalChart(
        sigma=float(sigma),
        U_sigma=float(u_period(sigma)),
        V_sigma=float(v_period(sigma)),
        x_table=xs,
        u_table=np.asarray(us),
        y_table=ys,
        v_table=np.asarray(vs),
    )


def v_epsilon(sigma, eps):
    """Chart ordinate of the circle ``|z| = sqrt(eps)`` on the real axis ``x = 0``.

    At ``x = 0`` the map reduces to ``z = cot(y / 2)``; the returned value is
    ``v(y)`` for the ``y`` in ``(pi/2, pi)`` with ``cot(y/2) = sqrt(eps)``.
    """
    _check_sigma(sigma)
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must lie in (0, 1)")
    y = 2.0 * np.arctan2(1.0, np.sqrt(eps))
    return float(incomplete_F(y - np.pi / 2, np.cos(sigma) ** 2))


def limit_v_of_y(y, convention="chart"):
    """``v(y)`` in the limit ``sigma -> 0``.

    ``convention="chart"`` is the limit of the defining integral,
    ``v = ln tan(y/2)``. ``convention="halved"`` is the normalization
    ``v = (1/2) ln tan(y/2)`` under which ``cos y = (1 - e^{4v}) / (1 + e^{4v})``.
    """
    base = np.log(np.tan(np.asarray(y, dtype=float) / 2.0))
    if convention == "chart":
        return base
    if convention == "halved":
        return 0.5 * base
    raise DomainError(f"unknown convention {convention!r}")


def limit_y_of_v(v, convention="chart"):
    """Inverse of :func:`limit_v_of_y`."""
    v = np.asarray(v, dtype=float)
    if convention == "chart":
        return 2.0 * np.arctan(np.exp(v))
    if convention == "halved":
        return 2.0 * np.arctan(np.exp(2.0 * v))
    raise DomainError(f"unknown convention {convention!r}")


def cot_identity_gap(sigma):
    """Gap in ``K(-cot^2 sigma) / sin(sigma) = K(cos^2 sigma)`` (should vanish)."""
    lhs = _K_unchecked(-1.0 / np.tan(sigma) ** 2) / np.sin(sigma)
    return float(lhs - complete_K(np.cos(sigma) ** 2))


def radius_to_y(rad):
    """``y`` on the ray ``x = 0`` with ``|z| = rad`` (``z = cot(y/2)``)."""
    return brentq(lambda y: 1.0 / np.tan(y / 2) - rad, 1e-14, np.pi - 1e-14)
