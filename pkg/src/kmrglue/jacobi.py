"""Linearized operators: catenoid, plane and Lame Jacobi operators, the reduced
Lame eigenproblem, the half-cylinder right inverse and the exterior Dirichlet
solver.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .coords import build_chart, u_period
from .errors import DomainError, ResolutionError
from .kernels import tridiag_solve_batched

__all__ = [
    "catenoid_jacobi",
    "catenoid_kernel_fields",
    "plane_jacobi",
    "lame_apply",
    "lame_apply_separable",
    "legendre_kernel_residual",
    "SpectralSystem",
    "reduced_spectrum",
    "HalfCylinderSolution",
    "right_inverse_halfcylinder",
    "dirichlet_injectivity_margin",
    "PolarGrid",
    "ExteriorSolution",
    "dirichlet_exterior_solve",
]


# ---------------------------------------------------------------- catenoid / plane


def _fd4_second(func, x, h, axis_shift):
    return (
        -func(*axis_shift(x, 2 * h))
        + 16 * func(*axis_shift(x, h))
        - 30 * func(*axis_shift(x, 0.0))
        + 16 * func(*axis_shift(x, -h))
        - func(*axis_shift(x, -2 * h))
    ) / (12 * h * h)


def catenoid_jacobi(w, s, theta, w_ss=None, w_tt=None, h=1e-3):
    """Jacobi operator about the catenoid, ``cosh^-2 s (w_ss + w_tt + 2 w / cosh^2 s)``.

    Parameters
    ----------
    w : callable or array_like
        Either a callable ``w(s, theta)`` or its values at ``(s, theta)``.
    w_ss, w_tt : array_like, optional
        Exact second derivatives. When omitted, ``w`` must be callable and
        fourth-order central differences with step ``h`` are used.
    """
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if callable(w):
        val = w(s, theta)
        if w_ss is None:
            w_ss = _fd4_second(w, (s, theta), h, lambda p, d: (p[0] + d, p[1]))
        if w_tt is None:
            w_tt = _fd4_second(w, (s, theta), h, lambda p, d: (p[0], p[1] + d))
    else:
        val = np.asarray(w, dtype=float)
        if w_ss is None or w_tt is None:
            raise DomainError("array input needs exact w_ss and w_tt")
    sech2 = 1.0 / np.cosh(s) ** 2
    return sech2 * (w_ss + w_tt + 2.0 * val * sech2)


def catenoid_kernel_fields():
    """Dilation and translation Jacobi fields with exact second derivatives.

    Returns
    -------
    dict
        name -> ``(w, w_ss, w_tt)`` callables of ``(s, theta)``.
    """
    return {
        "dilation": (
            lambda s, t: np.tanh(s) + 0 * t,
            lambda s, t: -2 * np.tanh(s) / np.cosh(s) ** 2 + 0 * t,
            lambda s, t: 0 * s + 0 * t,
        ),
        "translation": (
            lambda s, t: np.cos(t) / np.cosh(s),
            lambda s, t: np.cos(t) * (np.tanh(s) ** 2 - 1 / np.cosh(s) ** 2) / np.cosh(s),
            lambda s, t: -np.cos(t) / np.cosh(s),
        ),
    }


def plane_jacobi(v, x, y, h=1e-3):
    """Jacobi operator about the plane at a puncture, ``|x|^4 Laplacian``, by differences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lap = _fd4_second(v, (x, y), h, lambda p, d: (p[0] + d, p[1])) + _fd4_second(
        v, (x, y), h, lambda p, d: (p[0], p[1] + d)
    )
    return (x * x + y * y) ** 2 * lap


# ---------------------------------------------------------------- Lame operator


def _lame_potential(u, v, sigma, chart):
    x = chart.x_of_u(u)
    y = chart.y_of_v(v)
    return 2 * np.sin(sigma) ** 2 * np.cos(x) ** 2 + 2 * np.cos(sigma) ** 2 * np.sin(y) ** 2


def lame_apply(f, u, v, sigma, chart=None):
    """Lame operator on a uniform ``(v, u)`` grid by fourth-order differences.

    Parameters
    ----------
    f : ndarray, shape (nv, nu)
        Samples on ``v[:, None], u[None, :]``.
    u, v : ndarray
        Uniform grids.

    Returns
    -------
    ndarray, shape (nv - 4, nu - 4)
        Values on the interior points ``f[2:-2, 2:-2]``.
    """
    chart = chart or build_chart(sigma)
    f = np.asarray(f, dtype=float)
    hu = u[1] - u[0]
    hv = v[1] - v[0]
    fuu = (-f[2:-2, 4:] + 16 * f[2:-2, 3:-1] - 30 * f[2:-2, 2:-2] + 16 * f[2:-2, 1:-3] - f[2:-2, :-4]) / (12 * hu**2)
    fvv = (-f[4:, 2:-2] + 16 * f[3:-1, 2:-2] - 30 * f[2:-2, 2:-2] + 16 * f[1:-3, 2:-2] - f[:-4, 2:-2]) / (12 * hv**2)
    U, V = np.meshgrid(u[2:-2], v[2:-2])
    return fuu + fvv + _lame_potential(U, V, sigma, chart) * f[2:-2, 2:-2]


def lame_apply_separable(a, a_vv, b, b_uu, u, v, sigma, chart=None):
    """Lame operator on ``f = a(v) b(u)`` from exact factor derivatives."""
    chart = chart or build_chart(sigma)
    U, V = np.meshgrid(u, v)
    A = np.asarray(a)[:, None]
    B = np.asarray(b)[None, :]
    return np.asarray(a_vv)[:, None] * B + A * np.asarray(b_uu)[None, :] + _lame_potential(U, V, sigma, chart) * A * B


def legendre_kernel_residual(sigma, j, v_max=6.0, n_v=1201, n_u=64):
    """Lame operator applied to ``Q_1^j(cos y(v)) cos(j u)`` with exact derivatives.

    ``y(v)`` is the chart inverse, so ``y_v = m(y)`` and
    ``y_vv = cos^2(sigma) cos y sin y``.

    Returns
    -------
    dict
        ``max_abs`` residual, ``max_rel`` (divided by ``max |f|``), both over
        ``|v| <= v_max`` and one ``u``-period.
    """
    from .coords import m_factor
    from .specfun import legendre_Q1_derivatives

    chart = build_chart(sigma)
    v = np.linspace(-v_max, v_max, n_v)
    u = np.linspace(0.0, chart.U_sigma, n_u, endpoint=False)
    y = chart.y_of_v(v)
    t = np.cos(y)
    Q, dQ, d2Q = legendre_Q1_derivatives(j, t)
    yv = m_factor(y, sigma)
    yvv = np.cos(sigma) ** 2 * np.cos(y) * np.sin(y)
    a = Q
    a_vv = d2Q * np.sin(y) ** 2 * yv**2 - dQ * np.cos(y) * yv**2 - dQ * np.sin(y) * yvv
    b = np.cos(j * u)
    res = lame_apply_separable(a, a_vv, b, -(j**2) * b, u, v, sigma, chart)
    f = a[:, None] * b[None, :]
    return {"max_abs": float(np.max(np.abs(res))), "max_rel": float(np.max(np.abs(res)) / np.max(np.abs(f)))}


# ---------------------------------------------------------------- reduced spectrum


def _fourier_second_derivative_matrix(n, period):
    """Spectral second-derivative matrix on ``n`` equispaced periodic points (n even)."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    eye = np.eye(n)
    sym = -(2 * np.pi * k / period) ** 2
    sym[n // 2] = -(np.pi * n / period) ** 2  # Nyquist kept symmetric
    return np.real(np.fft.ifft(sym[:, None] * np.fft.fft(eye, axis=0), axis=0))


@dataclass(frozen=True)
class SpectralSystem:
    """Eigenpairs of the reduced Lame operator ``L = d_uu + 2 sin^2(sigma) cos^2(x(u))``.

    Eigenvalues are those of ``-L``. ``indices[k]`` is the mode number ``i``
    of row ``k`` (``0..N`` for even parity, ``1..N`` for odd).
    """

    sigma: float
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray = field(repr=False)
    u_grid: np.ndarray = field(repr=False)
    parity: str
    U_sigma: float
    indices: np.ndarray = field(repr=False)

    def eigenvalue(self, i):
        return float(self.eigenvalues[self._row(i)])

    def _row(self, i):
        hits = np.nonzero(self.indices == i)[0]
        if hits.size == 0:
            raise DomainError(f"mode {i} not available for parity {self.parity}")
        return int(hits[0])

    def evaluate(self, u, i):
        """Trigonometric interpolation of ``e_{sigma,i}`` at ``u`` (``i`` may be an array)."""
        u = np.asarray(u, dtype=float)
        idx = np.atleast_1d(i)
        rows = [self._row(int(j)) for j in idx]
        n = self.u_grid.size
        coef = np.fft.fft(self.eigenfunctions[rows], axis=-1) / n
        k = np.fft.fftfreq(n, d=1.0 / n)
        k[n // 2] = 0.0  # drop the Nyquist mode (negligible for resolved modes)
        phase = np.exp(2j * np.pi * np.multiply.outer(u, k) / self.U_sigma)
        vals = np.real(phase @ coef.T)
        return vals if np.ndim(i) else vals[..., 0]

    def project(self, samples):
        """Coefficients of grid samples (last axis on ``u_grid``) in the eigenbasis."""
        du = self.U_sigma / self.u_grid.size
        return np.asarray(samples) @ self.eigenfunctions.T * du


def reduced_spectrum(sigma, N=8, parity="even", n_grid=256, check_bounds=True, tol=1e-8):
    """Eigenpairs of the reduced Lame operator on ``U_sigma``-periodic functions.

    The operator is discretized spectrally on ``n_grid`` equispaced points and
    restricted to the requested parity class.

    Parameters
    ----------
    sigma : float
        Cone parameter in ``(0, pi/2)``.
    N : int
        Highest mode returned (``N <= 32``).
    parity : {"even", "odd"}
    check_bounds : bool
        Raise :class:`ResolutionError` if a computed eigenvalue leaves
        ``[(2 pi i / U)^2 - 2 sin^2 sigma, (2 pi i / U)^2]`` by more than ``tol``.

    Returns
    -------
    SpectralSystem
        Eigenfunctions normalized by ``int e^2 du = 1`` with ``e(0) > 0``
        (even) or ``e'(0) > 0`` (odd).
    """
    if not (0.0 < sigma < np.pi / 2):
        raise DomainError("sigma must lie in (0, pi/2)")
    if not (0 <= N <= 32):
        raise DomainError("N must lie in 0..32")
    if parity not in ("even", "odd"):
        raise DomainError("parity must be 'even' or 'odd'")
    if n_grid % 2 or n_grid < 4 * (N + 2):
        raise DomainError("n_grid must be even and resolve the requested modes")
    chart = build_chart(sigma)
    U = chart.U_sigma
    u = np.arange(n_grid) * U / n_grid
    pot = 2 * np.sin(sigma) ** 2 * np.cos(chart.x_of_u(u)) ** 2
    A = -(_fourier_second_derivative_matrix(n_grid, U) + np.diag(pot))
    # orthonormal basis of the parity class: u_k <-> u_{n-k}
    half = n_grid // 2
    cols = []
    if parity == "even":
        for k in range(half + 1):
            e = np.zeros(n_grid)
            e[k] = 1.0
            e[(-k) % n_grid] = 1.0
            cols.append(e / np.linalg.norm(e))
    else:
        for k in range(1, half):
            e = np.zeros(n_grid)
            e[k] = 1.0
            e[n_grid - k] = -1.0
            cols.append(e / np.linalg.norm(e))
    P = np.array(cols).T
    red = P.T @ A @ P
    red = 0.5 * (red + red.T)
    vals, vecs = np.linalg.eigh(red)
    first = 0 if parity == "even" else 1
    count = N + 1 - first
    vals = vals[:count]
    funcs = (P @ vecs[:, :count]).T
    du = U / n_grid
    funcs /= np.sqrt(np.sum(funcs**2, axis=1, keepdims=True) * du)[:, :]
    for row in range(count):
        ref = funcs[row, 0] if parity == "even" else funcs[row, 1]
        if ref < 0:
            funcs[row] *= -1
    indices = np.arange(first, N + 1)
    if check_bounds:
        base = (2 * np.pi * indices / U) ** 2
        gap = vals - base
        if np.any(gap > tol) or np.any(gap < -2 * np.sin(sigma) ** 2 - tol):
            raise ResolutionError("eigenvalues leave the variational bracket; refine n_grid")
    return SpectralSystem(float(sigma), vals, funcs, u, parity, float(U), indices)


# ---------------------------------------------------------------- half-cylinder right inverse


@dataclass(frozen=True)
class HalfCylinderSolution:
    """Mode-wise solution of the Lame equation on ``[v0, V_max]``."""

    v: np.ndarray
    modes: np.ndarray
    basis: SpectralSystem = field(repr=False)
    forcing_modes: np.ndarray = field(repr=False)
    potential: np.ndarray = field(repr=False)

    def __call__(self, u, v_index=None):
        """Field values on ``u`` (1-D) for all stored ``v`` (or one row)."""
        e = self.basis.evaluate(np.asarray(u, dtype=float), self.basis.indices)
        W = self.modes if v_index is None else self.modes[:, [v_index]]
        return (e @ W).T

    def mode_residual(self):
        """Max residual of ``w'' + P w - f`` per mode by second differences."""
        h = self.v[1] - self.v[0]
        W = self.modes
        lap = (W[:, 2:] - 2 * W[:, 1:-1] + W[:, :-2]) / h**2
        res = lap + self.potential[:, 1:-1] * W[:, 1:-1] - self.forcing_modes[:, 1:-1]
        return np.max(np.abs(res), axis=1)

    def weighted_norm(self, mu):
        return float(np.max(np.exp(-mu * self.v) * np.max(np.abs(self.modes), axis=0)))


def right_inverse_halfcylinder(sigma, v0, f, mu=-1.5, N=8, v_span=20.0, n_v=4001, basis=None):
    """Solve the Lame equation ``L w = f`` on ``[v0, v0 + v_span]`` mode by mode.

    Modes ``i >= 2`` take ``w(v0) = 0`` and the outflow condition
    ``w' = -sqrt(i^2 - 2) w`` at the far end. Modes ``0, 1`` are integrated
    backward from the far end with ``w = w' = 0``, so the boundary trace at
    ``v0`` lies in the span of the first two eigenfunctions.

    Parameters
    ----------
    f : callable or ndarray
        ``f(u, v)`` evaluated on the basis grid, or an array of mode
        coefficients with shape ``(N + 1, n_v)``.
    mu : float
        Decay weight in ``(-2, -1)``; ``f`` must be ``O(e^{mu v})``.
    """
    if not (-2.0 < mu < -1.0):
        raise DomainError("weight mu must lie in (-2, -1)")
    basis = basis or reduced_spectrum(sigma, N, "even")
    chart = build_chart(sigma)
    v = np.linspace(v0, v0 + v_span, n_v)
    h = v[1] - v[0]
    if callable(f):
        samples = f(basis.u_grid[None, :], v[:, None])
        F = basis.project(samples).T
    else:
        F = np.asarray(f, dtype=float)
        if F.shape != (basis.indices.size, n_v):
            raise DomainError("mode array has the wrong shape")
    weighted = np.exp(-mu * v) * np.max(np.abs(F), axis=0)
    if weighted[-1] > 10 * max(weighted[: n_v // 2].max(), 1e-300):
        raise DomainError("forcing does not decay at the prescribed rate")
    lam = basis.eigenvalues
    pot = 2 * np.cos(sigma) ** 2 * np.sin(chart.y_of_v(v)) ** 2
    P = pot[None, :] - lam[:, None]
    W = np.zeros_like(F)
    hi = basis.indices >= 2
    if np.any(hi):
        Fi = F[hi]
        m, n = Fi.shape
        a = np.full((m, n), 1.0 / h**2)
        c = np.full((m, n), 1.0 / h**2)
        b = -2.0 / h**2 + P[hi]
        d = Fi.copy()
        # Dirichlet at v0
        b[:, 0], c[:, 0], d[:, 0] = 1.0, 0.0, 0.0
        a[:, 0] = 0.0
        # outflow at the far end through a ghost point
        rate = np.sqrt(basis.indices[hi] ** 2 - 2.0)
        a[:, -1] = 2.0 / h**2
        b[:, -1] = -2.0 / h**2 - 2.0 * rate / h + P[hi][:, -1]
        c[:, -1] = 0.0
        W[hi] = tridiag_solve_batched(a, b, c, d)
    for row in np.nonzero(~hi)[0]:
        w = np.zeros(n_v)
        for k in range(n_v - 2, 0, -1):
            w[k - 1] = 2 * w[k] - w[k + 1] + h * h * (F[row, k] - P[row, k] * w[k])
        W[row] = w
    return HalfCylinderSolution(v, W, basis, F, P)


def dirichlet_injectivity_margin(sigma, v0, width, n_v=801, N=8):
    """Smallest singular value of the discrete Dirichlet problem for modes ``i >= 2``."""
    basis = reduced_spectrum(sigma, N, "even")
    chart = build_chart(sigma)
    v = np.linspace(v0, v0 + width, n_v)
    h = v[1] - v[0]
    pot = 2 * np.cos(sigma) ** 2 * np.sin(chart.y_of_v(v[1:-1])) ** 2
    out = []
    for lam in basis.eigenvalues[2:]:
        n = n_v - 2
        M = (np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)) / h**2
        M += np.diag(pot - lam)
        out.append(np.linalg.svd(M, compute_uv=False)[-1])
    return float(min(out))


# ---------------------------------------------------------------- exterior Dirichlet solver


@dataclass(frozen=True)
class PolarGrid:
    """Log-radial by angular grid on ``s <= rho <= ratio * s``.

    Angles are offset by half a step so that no node lies on ``theta = 0, pi``.
    """

    s: float
    ratio: float = 1e3
    n_r: int = 400
    n_theta: int = 64

    @property
    def t(self):
        return np.linspace(np.log(self.s), np.log(self.s * self.ratio), self.n_r)

    @property
    def rho(self):
        return np.exp(self.t)

    @property
    def theta(self):
        return (np.arange(self.n_theta) + 0.5) * 2 * np.pi / self.n_theta

    @property
    def modes(self):
        return np.arange(self.n_theta // 2)

    def to_modes(self, values):
        """Cosine and sine coefficients along the last (angular) axis."""
        th = self.theta
        j = self.modes
        C = np.cos(np.outer(j, th))
        S = np.sin(np.outer(j, th))
        w = np.where(j == 0, 1.0, 2.0) / self.n_theta
        return (values @ C.T) * w, (values @ S.T) * w

    def from_modes(self, a, b, theta=None):
        th = self.theta if theta is None else np.asarray(theta, dtype=float)
        j = self.modes
        return a @ np.cos(np.outer(j, th)) + b @ np.sin(np.outer(j, th))


@dataclass(frozen=True)
class ExteriorSolution:
    """Mode-wise solution on a :class:`PolarGrid`."""

    grid: PolarGrid
    a: np.ndarray
    b: np.ndarray

    def on_grid(self):
        return self.a @ np.cos(np.outer(self.grid.modes, self.grid.theta)) + self.b @ np.sin(
            np.outer(self.grid.modes, self.grid.theta)
        )

    def _interp(self, coeffs, rho):
        t = np.log(np.asarray(rho, dtype=float))
        return CubicSpline(self.grid.t, coeffs, axis=0)(t)

    def __call__(self, rho, theta):
        rho, theta = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(theta, dtype=float))
        A = self._interp(self.a, rho.ravel())
        B = self._interp(self.b, rho.ravel())
        j = self.grid.modes
        ang = np.multiply.outer(theta.ravel(), j)
        out = np.sum(A * np.cos(ang) + B * np.sin(ang), axis=-1)
        return out.reshape(rho.shape)

    def d_rho(self, rho, theta):
        rho, theta = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(theta, dtype=float))
        t = np.log(rho.ravel())
        A = CubicSpline(self.grid.t, self.a, axis=0)(t, 1)
        B = CubicSpline(self.grid.t, self.b, axis=0)(t, 1)
        j = self.grid.modes
        ang = np.multiply.outer(theta.ravel(), j)
        out = np.sum(A * np.cos(ang) + B * np.sin(ang), axis=-1) / rho.ravel()
        return out.reshape(rho.shape)

    def d_theta(self, rho, theta):
        rho, theta = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(theta, dtype=float))
        A = self._interp(self.a, rho.ravel())
        B = self._interp(self.b, rho.ravel())
        j = self.grid.modes
        ang = np.multiply.outer(theta.ravel(), j)
        out = np.sum(j * (-A * np.sin(ang) + B * np.cos(ang)), axis=-1)
        return out.reshape(rho.shape)


def _solve_modes_t(grid, G, normalize=True):
    """Solve ``w_tt - j^2 w = G_j`` for every mode column of ``G`` (shape ``(n_r, n_modes)``)."""
    t = grid.t
    h = t[1] - t[0]
    n = t.size
    j = grid.modes.astype(float)
    m = j.size
    a = np.full((m, n), 1.0 / h**2)
    c = np.full((m, n), 1.0 / h**2)
    b = np.tile(-2.0 / h**2 - j[:, None] ** 2, (1, n))
    d = np.ascontiguousarray(G.T)
    # inner boundary: Dirichlet (mode 0 pinned, shifted afterwards)
    a[:, 0], b[:, 0], c[:, 0] = 0.0, 1.0, 0.0
    d[:, 0] = 0.0
    # outer boundary: w_t = -j w via ghost node (zero flux for j = 0)
    a[:, -1] = 2.0 / h**2
    b[:, -1] = -2.0 / h**2 - 2.0 * j / h - j**2
    c[:, -1] = 0.0
    W = tridiag_solve_batched(a, b, c, d).T
    if normalize:
        # mean zero for the finite-area weight rho^-6 near the puncture at infinity
        rho = grid.rho
        wgt = rho ** (-6) * rho**2  # area element rho d rho = rho^2 dt
        W[:, 0] -= np.sum(W[:, 0] * wgt) / np.sum(wgt)
    return W


def dirichlet_exterior_solve(s, f, grid=None, normalize=True):
    """Solve ``Laplacian w = f`` on ``{rho >= s}`` with ``w`` constant on ``rho = s``.

    Non-constant modes vanish on the inner circle and decay at infinity
    (outer Robin condition ``rho w_rho = -j w`` at ``rho = ratio * s``); the
    constant mode has zero flux at the outer radius and is shifted to mean
    zero for the area weight ``rho^-6``.

    Parameters
    ----------
    s : float
        Inner radius.
    f : callable or ndarray
        ``f(rho, theta)`` or samples of shape ``(n_r, n_theta)`` on ``grid``.
    grid : PolarGrid, optional

    Returns
    -------
    ExteriorSolution
    """
    if s <= 0:
        raise DomainError("inner radius must be positive")
    grid = grid or PolarGrid(s)
    if abs(grid.s - s) > 1e-14 * s:
        raise DomainError("grid inner radius differs from s")
    rho = grid.rho
    if callable(f):
        vals = f(rho[:, None], grid.theta[None, :])
    else:
        vals = np.asarray(f, dtype=float)
    vals = np.broadcast_to(vals, (grid.n_r, grid.n_theta))
    fa, fb = grid.to_modes(vals)
    G_a = fa * rho[:, None] ** 2
    G_b = fb * rho[:, None] ** 2
    A = _solve_modes_t(grid, G_a, normalize)
    B = _solve_modes_t(grid, G_b, normalize=False)
    B[:, 0] = 0.0
    return ExteriorSolution(grid, A, B)
