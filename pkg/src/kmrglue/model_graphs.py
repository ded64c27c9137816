"""Vertical-graph models of the ends joined by the gluing construction.

Conventions
-----------
All models are graphs ``x3 = U(r, theta)`` over a horizontal annulus. A model
is *inner* when it lives on ``r <= r_eps`` (its boundary dressing is the
interior extension ``(r / r_eps)^i``) and *outer* when it lives on
``r >= r_eps`` (dressing ``(r_eps / r)^i``). Top-type ends carry ``-log(2r)``
and bottom-type ends ``+log(2r)``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, DomainError, OrthogonalityError, ScaleError
from .harmonic import FourierBoundary, extend_exterior, extend_interior
from .jacobi import PolarGrid, dirichlet_exterior_solve
from .kernels import mean_curvature_grid
from .kmr import GraphExpansion, SurfaceParams, catenoidal_expansion

__all__ = [
    "KINDS",
    "EndModel",
    "seam_radius",
    "chm_end_graph",
    "flat_annulus",
    "ScherkGraph",
    "scherk_solve",
    "scherk_period",
    "kmr_boundary_graph",
    "flux",
    "mean_curvature_residual",
]

KINDS = (
    "chm_top",
    "chm_bottom",
    "chm_middle",
    "scherk_up",
    "scherk_down",
    "flat_annulus",
    "kmr_top_beta0",
    "kmr_top_alpha0",
)
_LOG_SIGN = {"top": -1.0, "bottom": 1.0, "flat": 0.0}


def seam_radius(eps):
    """Seam circle radius ``r_eps = 1 / (2 sqrt(eps))``."""
    if not (0 < eps < 1):
        raise ScaleError("eps must lie in (0, 1)")
    return 0.5 / np.sqrt(eps)


@dataclass(frozen=True)
class EndModel:
    """A graph model of one end.

    Attributes
    ----------
    kind : str
        One of :data:`KINDS`.
    expansion : object
        Callable ``U(r, theta)`` with a ``d_r`` method.
    asymptotics : tuple
        Directions ``(theta_1, theta_2)`` for Scherk kinds, ``(0, 0)`` otherwise.
    period : float
        ``|T|`` (``inf`` for non-periodic ends).
    dressing : {"interior", "exterior", "none"}
        Which harmonic extension carries the boundary data.
    data : FourierBoundary or None
        The boundary data carried by the dressing.
    reflected : bool
        Bottom copy obtained by reflecting a top model through a horizontal plane.
    """

    kind: str
    expansion: object
    asymptotics: tuple = (0.0, 0.0)
    period: float = np.inf
    dressing: str = "none"
    data: FourierBoundary = None
    reflected: bool = False
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown end kind {self.kind!r}")
        if self.dressing not in ("interior", "exterior", "none"):
            raise DomainError(f"unknown dressing {self.dressing!r}")

    @property
    def logCoeff(self):
        """Coefficient of ``log(2r)`` in ``U``: -1 top-type, +1 bottom-type, 0 flat."""
        base = self.expansion.log_coefficient() if hasattr(self.expansion, "log_coefficient") else -self.expansion.logCoeff
        return -base if self.reflected else base

    @property
    def parity(self):
        return self.data.parity if self.data is not None else "even"

    def __call__(self, r, theta):
        val = self.expansion(r, theta)
        return -val if self.reflected else val

    def d_r(self, r, theta):
        val = self.expansion.d_r(r, theta)
        return -val if self.reflected else val

    def reflect(self):
        """Mirror image through a horizontal plane (``U -> -U``)."""
        return replace(self, reflected=not self.reflected)


def _check_norm(phi, eps, kappa, who):
    if kappa is not None and phi.sup_norm() > kappa * eps:
        raise ScaleError(f"{who}: boundary data norm exceeds kappa * eps")


def _require_perp(phi, flags, who):
    for i in phi._forced_zero(frozenset(flags)):
        if abs(phi.coefficient(i)) > 0.0:
            raise OrthogonalityError(f"{who}: boundary data must vanish on mode {i}")


def chm_end_graph(end, eps, psi, sigma_end=0.0, tilt=None, dressing="interior", kappa=None, parity="even", budget_constant=1.0):
    """Graph model of a Costa-Hoffman-Meeks end near the seam circle.

    ``top``:    ``sigma_end - log(2r) + k r b_1(theta) + H_psi``
    ``bottom``: ``-sigma_end + log(2r) + k r b_1(theta) + H_psi``
    ``middle``: ``H_psi``

    where ``b_1`` is ``cos`` (even data) or ``sin`` (odd data),
    ``k = -eps/2`` unless ``tilt`` is given, and ``H_psi`` is the harmonic
    extension of ``psi`` from the seam ``r_eps``. With ``dressing="interior"``
    the extension is ``(r / r_eps)^i``, which equals the half-cylinder
    extension ``e^{-i (s_eps - log 2r)}``.

    Parameters
    ----------
    end : {"top", "bottom", "middle"}
    eps : float
    psi : FourierBoundary
        Must be orthogonal to ``1`` and to ``b_1`` for top/bottom ends and
        to ``1`` for the middle end.
    sigma_end : float
        Vertical position ``sigma_t`` or ``sigma_b``.
    tilt : float, optional
        Overrides the slope ``-eps/2``; ``0`` is the configuration with
        vanishing translation parameter.
    kappa : float, optional
        When given, enforce ``|psi| <= kappa * eps``.
    """
    if end not in ("top", "bottom", "middle"):
        raise DomainError(f"unknown CHM end {end!r}")
    if psi.parity != parity:
        raise OrthogonalityError(f"CHM end expects {parity} data")
    if end == "middle":
        _require_perp(psi, {"perp1"}, "chm_end_graph")
    else:
        _require_perp(psi, {"perp_e01"}, "chm_end_graph")
    _check_norm(psi, eps, kappa, "chm_end_graph")
    r_eps = seam_radius(eps)
    k = -0.5 * eps if tilt is None else float(tilt)
    tilt_pair = (k, 0.0) if parity == "even" else (0.0, -k)
    if end == "middle":
        exp = GraphExpansion(0.0, boundaryRadius=r_eps, dressing=psi, dressing_kind=dressing, remainderBudget=budget_constant * eps)
    else:
        c = 1.0 if end == "top" else -1.0
        exp = GraphExpansion(
            c,
            tilt=tilt_pair,
            offset=c * sigma_end,
            boundaryRadius=r_eps,
            dressing=psi,
            dressing_kind=dressing,
            remainderBudget=budget_constant * eps,
        )
    info = {"s_eps": -0.5 * np.log(eps), "r_eps": r_eps, "rho_eps": 2 * np.sqrt(eps)}
    return EndModel(f"chm_{end}", exp, dressing=dressing, data=psi, info=info)


def flat_annulus(eps, phi, dressing="exterior", offset=0.0):
    """Flat periodic annulus ``offset + H_phi`` (no logarithmic term)."""
    _require_perp(phi, {"perp1"}, "flat_annulus")
    exp = GraphExpansion(0.0, offset=offset, boundaryRadius=seam_radius(eps), dressing=phi, dressing_kind=dressing)
    return EndModel("flat_annulus", exp, dressing=dressing, data=phi)


def kmr_boundary_graph(family, params, gamma, xi, d, phi, eps, kappa_shift=0.0, dressing="exterior", tilt="stated", budget_constant=1.0):
    """Graph model of a dilated, translated KMR example near its neck.

    ``-(1+gamma) log(2r/(1+gamma)) + r (k1 cos - k2 sin) - ((1+gamma)/r)(xi1 cos + xi2 sin) + d + H_phi``

    Parameters
    ----------
    family : {"beta0", "alpha0"}
        ``beta0`` uses even data orthogonal to the first two Lame modes,
        ``alpha0`` odd data orthogonal to ``sin``.
    params : SurfaceParams
    gamma : float
        Dilation.
    xi : (float, float)
        Horizontal translation.
    d : float
        Vertical offset.
    kappa_shift : float
        Extra slope added to the tilt along ``cos`` (``beta0``) or ``sin`` (``alpha0``).
    tilt : {"stated", "measured"}
        Slope convention passed to :func:`kmr.catenoidal_expansion`.
    """
    if family == "beta0":
        if params.beta != 0.0:
            raise DomainError("beta0 family needs beta = 0")
        if phi.parity != "even":
            raise OrthogonalityError("beta0 family needs even data")
    elif family == "alpha0":
        if params.alpha != 0.0:
            raise DomainError("alpha0 family needs alpha = 0")
        if phi.parity != "odd":
            raise OrthogonalityError("alpha0 family needs odd data")
    else:
        raise DomainError(f"unknown KMR family {family!r}")
    _require_perp(phi, {"perp_e01"} if family == "beta0" else {"perpsin"}, "kmr_boundary_graph")
    if abs(gamma) + np.hypot(*xi[:2]) > eps:
        raise ScaleError("dilation plus translation must not exceed eps")
    base = catenoidal_expansion(params, gamma, (xi[0], xi[1], d), eps, budget_constant, tilt=tilt)
    k1, k2 = base.tilt
    if family == "beta0":
        k1 += kappa_shift
    else:
        k2 -= kappa_shift
    exp = replace(base, tilt=(k1, k2), boundaryRadius=seam_radius(eps), dressing=phi, dressing_kind=dressing)
    kind = "kmr_top_beta0" if family == "beta0" else "kmr_top_alpha0"
    return EndModel(kind, exp, dressing=dressing, data=phi, info={"params": params})


# ---------------------------------------------------------------- Scherk-type ends


def scherk_period(theta1, theta2):
    """Period length fixed by ``|T| (sin theta_1 + sin theta_2) = 2 pi``."""
    total = np.sin(theta1) + np.sin(theta2)
    if total <= 0:
        raise DomainError("period is free when both directions vanish")
    return 2 * np.pi / total


@dataclass(frozen=True)
class ScherkGraph:
    """Solved Scherk-type graph ``U = c0 + Psi + w_phi + v`` in the coordinate ``q = tanh(pi zeta / L)``.

    ``Psi = l Gamma + b x_1`` is the harmonic model with the prescribed end
    slopes, ``w_phi`` the exterior harmonic extension in ``q`` that makes the
    boundary trace equal to ``phi``, and ``v`` the nonlinear correction.
    """

    L: float
    s: float
    s_q: float
    ell: float
    b: float
    c0: float
    w_coef: np.ndarray
    v: object
    trace: list = field(default_factory=list, repr=False)

    def log_coefficient(self):
        return -self.ell

    def _q(self, r, theta):
        zeta = np.asarray(r, dtype=float) * np.exp(1j * np.asarray(theta, dtype=float))
        return zeta, np.tanh(np.pi * zeta / self.L)

    def _holo(self, q):
        """Value (real part) and derivative of the holomorphic part ``Psi + w_phi``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            F = self.ell * (-np.log(q) + 0.5 * np.log(1 - q * q) - np.log(self.L / np.pi)) + self.b * (
                self.L / (2 * np.pi)
            ) * np.log((1 + q) / (1 - q))
            dF = self.ell * (-1 / q - q / (1 - q * q)) + self.b * (self.L / np.pi) / (1 - q * q)
            j = np.arange(self.w_coef.size)
            pw = (self.s_q / q[..., None]) ** j
            F = F + np.sum(self.w_coef * pw, axis=-1)
            dF = dF - np.sum(self.w_coef * j * pw, axis=-1) / q
        return np.real(F), dF

    def __call__(self, r, theta):
        _, q = self._q(r, theta)
        val, _ = self._holo(q)
        return self.c0 + val + self.v(np.abs(q), np.angle(q))

    def gradient(self, r, theta):
        """Complex gradient ``U_x + i U_y`` in the physical plane."""
        zeta, q = self._q(r, theta)
        _, dF = self._holo(q)
        rho = np.abs(q)
        ang = np.angle(q)
        gv = (self.v.d_rho(rho, ang) + 1j * self.v.d_theta(rho, ang) / rho) * np.exp(1j * ang)
        gq = np.conj(dF) + gv
        dq = (np.pi / self.L) * (1 - q * q)
        return gq * np.conj(dq)

    def d_r(self, r, theta):
        g = self.gradient(r, theta)
        return np.real(g * np.exp(-1j * np.asarray(theta, dtype=float)))


@dataclass(frozen=True)
class _Reflected:
    inner: object

    def log_coefficient(self):
        return -self.inner.log_coefficient()

    def __call__(self, r, theta):
        return -self.inner(r, theta)

    def d_r(self, r, theta):
        return -self.inner.d_r(r, theta)

    def gradient(self, r, theta):
        return -self.inner.gradient(r, theta)


def _grid_derivatives(values, grid):
    """``d/dt`` and ``d/dtheta`` of grid samples (radial second order, angular spectral)."""
    h = grid.t[1] - grid.t[0]
    dt = np.gradient(values, h, axis=0, edge_order=2)
    k = np.fft.fftfreq(grid.n_theta, d=1.0 / grid.n_theta)
    k[grid.n_theta // 2] = 0.0
    dth = np.real(np.fft.ifft(1j * k * np.fft.fft(values, axis=1), axis=1))
    return dt, dth


def scherk_solve(directions, period, eps, phi, offset=0.0, orientation="up", kappa=None, n_r=320, n_theta=128, tol=1e-10, max_iter=200):
    """Solve the minimal graph equation for a Scherk-type end outside the seam disk.

    Parameters
    ----------
    directions : (float, float)
        End directions ``(theta_1, theta_2)``, both in ``(0, eps)`` or both zero.
    period : float
        ``|T|``; must be at least ``4 / sqrt(eps)`` and, when the directions
        are nonzero, satisfy ``|T| (sin theta_1 + sin theta_2) = 2 pi``.
    eps : float
    phi : FourierBoundary
        Even boundary data orthogonal to ``1``.
    offset : float
        Vertical offset ``d``. The additive constant ``c0`` is chosen so that
        ``U + l log(2r)`` has boundary mean ``d`` on the seam circle.
    orientation : {"up", "down"}
        ``down`` is the reflection of the ``up`` solution for ``-phi``, ``-d``.

    Returns
    -------
    EndModel
        ``info`` holds the fixed-point trace (iteration, increment) and the
        measured contraction factor.

    Raises
    ------
    ConvergenceError
        If the fixed-point iteration diverges or hits ``max_iter``.
    """
    th1, th2 = (float(a) for a in directions)
    if orientation not in ("up", "down"):
        raise DomainError("orientation must be 'up' or 'down'")
    if not ((th1 == 0 and th2 == 0) or (0 < th1 < eps and 0 < th2 < eps)):
        raise DomainError("directions must both vanish or both lie in (0, eps)")
    L = float(period)
    if L < 4 / np.sqrt(eps) * (1 - 1e-12):
        raise ScaleError("period must be at least 4 / sqrt(eps)")
    if th1 + th2 > 0 and abs(L * (np.sin(th1) + np.sin(th2)) / (2 * np.pi) - 1) > 1e-9:
        raise DomainError("period must satisfy the flux normalization |T|(sin t1 + sin t2) = 2 pi")
    if phi.parity != "even":
        raise OrthogonalityError("Scherk ends take even data")
    _require_perp(phi, {"perp1"}, "scherk_solve")
    _check_norm(phi, eps, kappa, "scherk_solve")
    sign = 1.0 if orientation == "up" else -1.0
    phi_eff = phi * sign
    d_eff = sign * offset

    s = seam_radius(eps)
    s_q = float(np.tanh(np.pi * s / L))
    ell = L * (np.tan(th1) + np.tan(th2)) / (2 * np.pi)
    b = 0.5 * (np.tan(th2) - np.tan(th1))
    grid = PolarGrid(s_q, 1e3, n_r, n_theta)
    rho = grid.rho[:, None]
    ang = grid.theta[None, :]
    q = rho * np.exp(1j * ang)
    n_modes = max(phi.n, 1) + 1

    # boundary trace of Psi on the q-circle, removed by the dressing
    probe = ScherkGraph(L, s, s_q, ell, b, 0.0, np.zeros(1), _ZeroField())
    trace_vals, _ = probe._holo(s_q * np.exp(1j * grid.theta))
    j = np.arange(n_modes)
    ck = np.cos(np.outer(j, grid.theta))
    psi_modes = (trace_vals @ ck.T) * np.where(j == 0, 1.0, 2.0) / grid.n_theta
    phi_c = np.array([phi_eff.coefficient(i) for i in j])
    w_coef = np.where(j == 0, 0.0, phi_c - psi_modes)
    base = replace(probe, w_coef=w_coef)
    _, dF = base._holo(q)
    g_holo = np.conj(dF)
    metric = (np.pi / L) ** 2 * np.abs(1 - q * q) ** 2

    jj = grid.modes
    C = np.cos(np.outer(jj, grid.theta))
    A = np.zeros((grid.n_r, jj.size))
    history = []
    sol = None
    for it in range(1, max_iter + 1):
        v_grid = A @ C
        dvt, dvth = _grid_derivatives(v_grid, grid)
        G = g_holo + (dvt + 1j * dvth) * np.exp(1j * ang) / rho
        P = 1.0 + metric * np.abs(G) ** 2
        lpt, lpth = _grid_derivatives(np.log(P), grid)
        gradlp = (lpt + 1j * lpth) * np.exp(1j * ang) / rho
        f = 0.5 * np.real(G * np.conj(gradlp))
        sol = dirichlet_exterior_solve(s_q, f, grid, normalize=False)
        A_new = sol.a
        step = float(np.max(np.abs(A_new - A)))
        history.append((it, step))
        A = A_new
        if not np.isfinite(step) or (it > 3 and step > 1e3 * max(history[1][1], 1e-300)):
            raise ConvergenceError("Scherk fixed point diverged", history)
        if step < tol:
            break
    else:
        raise ConvergenceError("Scherk fixed point hit the iteration cap", history)
    from .jacobi import ExteriorSolution

    v = ExteriorSolution(grid, A, np.zeros_like(A))
    graph = replace(base, v=v, trace=history)
    # additive constant on the physical seam circle
    th = (np.arange(256) + 0.5) * 2 * np.pi / 256
    mean = float(np.mean(graph(s, th) + ell * np.log(2 * s)))
    graph = replace(graph, c0=d_eff - mean)
    steps = np.array([h[1] for h in history])
    ratios = steps[2:] / steps[1:-1] if steps.size > 3 else np.array([0.0])
    ratios = ratios[np.isfinite(ratios) & (steps[1:-1][: ratios.size] > 1e-14)]
    info = {
        "iterations": len(history),
        "trace": history,
        "contraction": float(np.max(ratios)) if ratios.size else 0.0,
        "ell": ell,
        "s_q": s_q,
        "correction_norm": float(np.max(np.abs(A))),
    }
    expansion = graph if orientation == "up" else _Reflected(graph)
    kind = "scherk_up" if orientation == "up" else "scherk_down"
    return EndModel(kind, expansion, asymptotics=(th1, th2), period=L, dressing="exterior", data=phi, info=info)


class _ZeroField:
    def __call__(self, rho, theta):
        return np.zeros(np.broadcast(rho, theta).shape)

    d_rho = d_theta = __call__


# ---------------------------------------------------------------- flux and residuals


def _gradient_polar(model, r, theta):
    """``(U_r, U_theta / r)`` on a circle; angular derivative spectral."""
    exp = model.expansion
    if hasattr(exp, "gradient"):
        g = exp.gradient(r, theta)
        if model.reflected:
            g = -g
        e = np.exp(-1j * theta)
        return np.real(g * e), np.imag(g * e)
    vals = model(r, theta)
    n = theta.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0
    ut = np.real(np.fft.ifft(1j * k * np.fft.fft(vals)))
    return model.d_r(r, theta), ut / r


def flux(model, radius, n=512):
    """Conormal flux ``int (U_r / W) r dtheta`` of the graph over the circle ``r = radius``.

    ``W = sqrt(1 + |grad U|^2)``. For a minimal graph this is independent of
    the circle.
    """
    theta = np.arange(n) * 2 * np.pi / n
    ur, ut = _gradient_polar(model, radius, theta)
    W = np.sqrt(1 + ur**2 + ut**2)
    return float(np.sum(ur / W) * radius * 2 * np.pi / n)


def _graph_curvature(func, xs, ys):
    X, Y = np.meshgrid(xs, ys)
    P = np.stack([X, Y, func(X, Y)], axis=-1)
    return mean_curvature_grid(np.ascontiguousarray(P), xs[1] - xs[0], ys[1] - ys[0])


def _planar_end_operator(func, xs, ys):
    """``|x|^4 div(grad u / sqrt(1 + |x|^4 |grad u|^2))`` in flux form."""
    h = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, ys)
    u = func(X, Y)

    def flux_x(i0, i1):
        ux = (u[1:-1, i1] - u[1:-1, i0]) / h
        uy = (u[2:, i0] + u[2:, i1] - u[:-2, i0] - u[:-2, i1]) / (4 * h)
        xm = 0.5 * (X[1:-1, i0] + X[1:-1, i1])
        ym = 0.5 * (Y[1:-1, i0] + Y[1:-1, i1])
        r4 = (xm**2 + ym**2) ** 2
        return ux / np.sqrt(1 + r4 * (ux**2 + uy**2))

    def flux_y(j0, j1):
        uy = (u[j1, 1:-1] - u[j0, 1:-1]) / h
        ux = (u[j0, 2:] + u[j1, 2:] - u[j0, :-2] - u[j1, :-2]) / (4 * h)
        xm = 0.5 * (X[j0, 1:-1] + X[j1, 1:-1])
        ym = 0.5 * (Y[j0, 1:-1] + Y[j1, 1:-1])
        r4 = (xm**2 + ym**2) ** 2
        return uy / np.sqrt(1 + r4 * (ux**2 + uy**2))

    nx = xs.size
    ny = ys.size
    fx_r = flux_x(slice(1, nx - 1), slice(2, nx))
    fx_l = flux_x(slice(0, nx - 2), slice(1, nx - 1))
    fy_t = flux_y(slice(1, ny - 1), slice(2, ny))
    fy_b = flux_y(slice(0, ny - 2), slice(1, ny - 1))
    div = (fx_r - fx_l + fy_t - fy_b) / h
    r4 = (X[1:-1, 1:-1] ** 2 + Y[1:-1, 1:-1] ** 2) ** 2
    return r4 * div


def _catenoid_operator(func, ss, ts):
    """Mean curvature of the normal graph ``X_c + w n_c`` minus that of the catenoid."""
    S, T = np.meshgrid(ss, ts)
    base = np.stack([np.cosh(S) * np.cos(T), np.cosh(S) * np.sin(T), S], axis=-1)
    normal = np.stack([np.cos(T), np.sin(T), -np.sinh(S)], axis=-1) / np.cosh(S)[..., None]
    w = func(S, T)
    hs = ss[1] - ss[0]
    ht = ts[1] - ts[0]
    H = mean_curvature_grid(np.ascontiguousarray(base + w[..., None] * normal), hs, ht)
    H0 = mean_curvature_grid(np.ascontiguousarray(base), hs, ht)
    return H - H0


def mean_curvature_residual(model, equation, region, h0, levels=3):
    """Residual of a nonlinear minimal-surface operator under grid refinement.

    Parameters
    ----------
    model : EndModel or callable
        A model (evaluated through ``U(r, theta)``) or a callable of the
        grid coordinates ``f(a, b)``.
    equation : {"planar_end", "catenoid_normal", "scherk_graph"}
        ``planar_end``: the puncture equation on Cartesian ``(x, y)``.
        ``catenoid_normal``: ``f(s, theta)`` is a normal graph over the catenoid.
        ``scherk_graph``: mean curvature of the graph on Cartesian ``(x, y)``.
    region : (a0, a1, b0, b1)
        Rectangle in the grid coordinates.
    h0 : float
        Coarsest spacing; each level halves it.

    Returns
    -------
    list of dict
        Rows ``h, max_residual, l2_residual, order_estimate``.
    """
    if isinstance(model, EndModel):
        m = model

        def func(x, y):
            return m(np.hypot(x, y), np.arctan2(y, x))

    elif callable(model):
        func = model
    else:
        raise DomainError("model must be an EndModel or a callable")
    ops = {"planar_end": _planar_end_operator, "catenoid_normal": _catenoid_operator, "scherk_graph": _graph_curvature}
    if equation not in ops:
        raise DomainError(f"unknown equation {equation!r}")
    a0, a1, b0, b1 = region
    rows = []
    for lvl in range(levels):
        h = h0 / 2**lvl
        na = int(round((a1 - a0) / h)) + 1
        nb = int(round((b1 - b0) / h)) + 1
        xs = a0 + h * np.arange(na)
        ys = b0 + h * np.arange(nb)
        res = ops[equation](func, xs, ys)
        row = {
            "h": h,
            "max_residual": float(np.max(np.abs(res))) if res.size else 0.0,
            "l2_residual": float(np.sqrt(np.mean(res**2) * (a1 - a0) * (b1 - b0))) if res.size else 0.0,
            "order_estimate": float("nan"),
        }
        if rows and rows[-1]["max_residual"] > 0 and row["max_residual"] > 0:
            row["order_estimate"] = float(np.log2(rows[-1]["max_residual"] / row["max_residual"]))
        rows.append(row)
    return rows
