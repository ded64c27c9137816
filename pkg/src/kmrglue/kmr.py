"""KMR examples from Weierstrass data: immersion, periods, graph expansions.

In the conformal chart ``zeta = u + i v`` the height differential is a
constant multiple of ``d zeta``: ``dh = i pi / (2 K(sin^2 sigma)) d zeta``.
The immersion is integrated along straight segments in ``zeta``, which avoids
sheet bookkeeping for ``w`` entirely. Direct evaluation in ``z`` with an
explicit sheet tag is available through :func:`weierstrass_at`.
"""

from dataclasses import dataclass, field

import numpy as np

from .coords import ConformalChart, Sheet, build_chart, k_factor, l_factor, m_factor, z_map
from .errors import BranchPointError, DomainError, KmrGlueError, ScaleError
from .harmonic import FourierBoundary
from .kernels import mean_curvature_grid
from .specfun import complete_K

__all__ = [
    "SurfaceParams",
    "MeshPatch",
    "GraphExpansion",
    "PathError",
    "weierstrass_at",
    "w_branch",
    "dh_dzeta",
    "immersion_integrand",
    "end_positions",
    "evaluate_patch",
    "end_period",
    "period_T",
    "chart_periods",
    "catenoidal_expansion",
    "expansion_error",
    "normal_graph_energy_density",
    "mean_curvature_order",
    "jacobi_factor",
    "sqrt_k_gradients",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class PathError(KmrGlueError, RuntimeError):
    """An integration path passes too close to an end of the surface."""


@dataclass(frozen=True)
class SurfaceParams:
    """Parameters ``(sigma, alpha, beta)`` of a KMR example and derived data."""

    sigma: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.sigma < np.pi / 2):
            raise DomainError(f"sigma must lie in (0, pi/2), got {self.sigma!r}")
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            if not (0.0 <= val <= np.pi / 2):
                raise DomainError(f"{name} must lie in [0, pi/2], got {val!r}")
        if self.alpha == 0.0 and self.beta == self.sigma:
            raise DomainError("(alpha, beta) = (0, sigma) is excluded")

    @property
    def lam(self):
        return 1.0 / np.tan(self.sigma / 2)

    @property
    def mu(self):
        return np.pi / (np.sin(self.sigma) * complete_K(np.sin(self.sigma) ** 2))

    @property
    def a(self):
        return np.cos((self.alpha + self.beta) / 2) + 1j * np.cos((self.alpha - self.beta) / 2)

    @property
    def b(self):
        return np.sin((self.alpha - self.beta) / 2) + 1j * np.sin((self.alpha + self.beta) / 2)

    @property
    def kappa1(self):
        return float(self.b.real + self.b.imag)

    @property
    def kappa2(self):
        return float(self.b.real - self.b.imag)

    def gauss_map(self, z):
        a, b = self.a, self.b
        return (a * z + b) / (1j * (np.conj(a) - np.conj(b) * z))

    def branch_values(self):
        lam = self.lam
        return np.array([-1j * lam, 1j * lam, 1j / lam, -1j / lam])

    def end_values(self):
        """``z`` values of the ends: the zero and the pole of the Gauss map."""
        a, b = self.a, self.b
        zero = -b / a
        pole = np.conj(a) / np.conj(b) if b != 0 else complex(np.inf)
        return zero, pole


def w_branch(z, lam, sheet=Sheet.ONE):
    """Sheet-consistent square root of ``(z^2 + lam^2)(z^2 + lam^-2)``.

    Sheet one is the branch asymptotic to ``lam * z`` on ``1/lam << |z| << lam``;
    its cuts are the imaginary-axis segments through ``0`` and ``infinity``.
    """
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = lam * z * np.sqrt((1 + z * z / lam**2) * (1 + 1 / (lam**2 * z * z)))
    w = np.where(z == 0, 1.0 + 0j, w)
    sign = np.where(np.asarray(sheet) == Sheet.ONE, 1.0, -1.0)
    return sign * w


def weierstrass_at(params, z, sheet=Sheet.ONE, tol=1e-12):
    """Gauss map and height-differential density at ``z`` on the given sheet.

    Returns
    -------
    g : complex
    dh_density : complex
        ``mu / w`` so that ``dh = dh_density * dz``.
    """
    z = complex(z)
    lam = params.lam
    for bv in params.branch_values():
        if abs(z - bv) <= tol * max(1.0, abs(bv)):
            raise BranchPointError(f"z={z} is a branch value of the Gauss map")
    if np.isinf(z):
        return complex(np.inf), 0j
    g = params.gauss_map(z)
    w = complex(w_branch(z, lam, sheet))
    return complex(g), params.mu / w


def dh_dzeta(params):
    """Constant ``dh / d zeta`` in the conformal chart."""
    return 1j * params.mu * np.sin(params.sigma) / 2


def immersion_integrand(params, chart, zeta):
    """Holomorphic 1-form components ``Phi`` with ``X = Re int Phi d zeta``."""
    zeta = np.asarray(zeta, dtype=complex)
    z = chart.z_of(zeta.real, zeta.imag)
    g = params.gauss_map(z)
    c = dh_dzeta(params)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / g
    return np.stack([0.5 * (inv - g) * c, 0.5j * (inv + g) * c, np.full_like(g, c)], axis=-1)


def end_positions(params, chart, newton_iters=60):
    """Chart positions (``zeta``) of the four ends in the fundamental cell.

    Each end value of ``z`` has one preimage per sheet. They are located by a
    coarse search in sphero-conal coordinates and polished by Newton steps on
    the holomorphic map ``zeta -> z``.
    """
    out = []
    xs = np.linspace(0, 2 * np.pi, 181, endpoint=False)
    for target in params.end_values():
        if np.isinf(target):
            # z = inf where l(x) cos y = 1: x in {0, pi}, y = 0
            out.extend(complex(chart.u_of_x(x), chart.v_of_y(0.0)) for x in (0.0, np.pi))
            continue
        if target == 0:
            # z = 0 sits on the cut y = pi, at x in {0, pi}
            out.extend(complex(chart.u_of_x(x), chart.v_of_y(np.pi)) for x in (0.0, np.pi))
            continue
        for y_lo, y_hi in ((1e-6, np.pi - 1e-6), (np.pi + 1e-6, 2 * np.pi - 1e-6)):
            X, Y = np.meshgrid(xs, np.linspace(y_lo, y_hi, 181))
            Z = z_map(X, Y, chart.sigma)
            k = np.unravel_index(np.argmin(np.abs(Z - target)), Z.shape)
            zeta = complex(chart.u_of_x(X[k]), chart.v_of_y(Y[k]))
            for _ in range(newton_iters):
                step = (chart.z_of(zeta.real, zeta.imag) - target) / chart.dz_dzeta(zeta.real, zeta.imag)
                zeta -= step
                if abs(step) < 1e-15:
                    break
            out.append(zeta)
    return np.array(out)


def _segment_integral(params, chart, z0, z1):
    """Integral of ``Phi`` along straight segments ``z0[k] -> z1[k]``."""
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    mid = 0.5 * (z0 + z1)
    half = 0.5 * (z1 - z0)
    nodes = mid[..., None] + half[..., None] * _GL_NODES
    vals = immersion_integrand(params, chart, nodes)
    return np.einsum("...kc,k->...c", vals, _GL_WEIGHTS) * half[..., None]


def _line_integral(params, chart, points, substeps=1):
    """Cumulative integrals of ``Phi`` along the polyline ``points``."""
    points = np.asarray(points, dtype=complex)
    if substeps > 1:
        t = np.linspace(0, 1, substeps + 1)
        fine = (points[:-1, None] + np.outer(points[1:] - points[:-1], t)[:, :-1]).ravel()
        points = np.concatenate([fine, points[-1:]])
    seg = _segment_integral(params, chart, points[:-1], points[1:])
    cum = np.concatenate([np.zeros((1, 3), dtype=complex), np.cumsum(seg, axis=0)])
    return cum[::substeps] if substeps > 1 else cum


def _dist_to_ends(ends, a, b):
    """Distance from the segment ``a -> b`` to the nearest end."""
    d = b - a
    if d == 0:
        return float(np.min(np.abs(ends - a)))
    t = np.clip(((ends - a) * np.conj(d)).real / abs(d) ** 2, 0, 1)
    return float(np.min(np.abs(ends - (a + t * d))))


def _ends_tiled(params, chart, ends=None):
    ends = end_positions(params, chart) if ends is None else ends
    shifts = [m * chart.U_sigma + 1j * n * chart.V_sigma for m in (-2, -1, 0, 1, 2) for n in (-2, -1, 0, 1, 2)]
    return np.concatenate([ends + s for s in shifts])


def _path_to(params, chart, target, ends, margin):
    """Polyline from the base point ``zeta = 0`` (``z = 1``) to ``target``."""
    candidates = [
        [0j, complex(target.real, 0.0), target],
        [0j, complex(0.0, target.imag), target],
    ]
    for off in (0.5, -0.5, 1.0, -1.0):
        mid = complex(target.real + off, 0.0)
        candidates.append([0j, mid, complex(mid.real, target.imag), target])
    for poly in candidates:
        if all(_dist_to_ends(ends, poly[k], poly[k + 1]) > margin for k in range(len(poly) - 1)):
            return poly
    raise PathError(f"no admissible path to zeta={target} with margin {margin}")


@dataclass(frozen=True)
class MeshPatch:
    """Sampled immersion on a ``(u, v)`` grid.

    Attributes
    ----------
    points : ndarray, shape (nv, nu, 3)
    u, v : ndarray
        Grid abscissae and ordinates.
    h : float
        Sample spacing.
    sheet : ndarray of Sheet
        Sheet tag per grid row.
    """

    points: np.ndarray
    u: np.ndarray
    v: np.ndarray
    h: float
    params: SurfaceParams
    chart: ConformalChart = field(repr=False)
    sheet: np.ndarray = field(repr=False)

    def faces(self):
        """Triangle index triples for the grid (row-major vertices)."""
        nv, nu = self.points.shape[:2]
        idx = np.arange(nv * nu).reshape(nv, nu)
        a = idx[:-1, :-1].ravel()
        b = idx[:-1, 1:].ravel()
        c = idx[1:, 1:].ravel()
        d = idx[1:, :-1].ravel()
        return np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])


def evaluate_patch(params, chart, region, h, margin=0.05, substeps=1):
    """Immersion on a rectangle of the conformal chart.

    Parameters
    ----------
    params : SurfaceParams
    chart : ConformalChart
        Chart built for ``params.sigma``.
    region : tuple
        ``(u0, u1, v0, v1)``; an empty rectangle yields an empty patch.
    h : float
        Grid spacing (rounded so the rectangle is tiled exactly).
    margin : float
        Minimum chart distance from paths and region to the ends.

    Returns
    -------
    MeshPatch
        ``X`` measured from the base point ``z = 1`` on sheet one.
    """
    if abs(chart.sigma - params.sigma) > 1e-14:
        raise DomainError("chart and parameters use different sigma")
    u0, u1, v0, v1 = (float(t) for t in region)
    if h <= 0:
        raise DomainError("spacing h must be positive")
    if u1 <= u0 or v1 <= v0:
        empty = np.zeros((0, 0, 3))
        return MeshPatch(empty, np.zeros(0), np.zeros(0), h, params, chart, np.zeros(0, dtype=int))
    nu = max(int(round((u1 - u0) / h)), 1)
    nv = max(int(round((v1 - v0) / h)), 1)
    u = np.linspace(u0, u1, nu + 1)
    v = np.linspace(v0, v1, nv + 1)
    ends = _ends_tiled(params, chart)
    inside = (ends.real > u0 - margin) & (ends.real < u1 + margin) & (ends.imag > v0 - margin) & (ends.imag < v1 + margin)
    if np.any(inside):
        raise PathError("region contains or touches an end of the surface")
    corner = complex(u0, v0)
    poly = _path_to(params, chart, corner, ends, margin)
    base = np.zeros(3, dtype=complex)
    for k in range(len(poly) - 1):
        seg_len = abs(poly[k + 1] - poly[k])
        n_sub = max(int(np.ceil(seg_len / min(h, 0.05))), 1)
        pts = poly[k] + (poly[k + 1] - poly[k]) * np.linspace(0, 1, n_sub + 1)
        base = base + _line_integral(params, chart, pts)[-1]
    row = base + _line_integral(params, chart, u + 1j * v0, substeps)
    cols = np.stack([_line_integral(params, chart, uu + 1j * v, substeps) for uu in u], axis=1)
    X = (row[None, :, :] + cols).real
    sheets = np.asarray(chart.sheet(v))
    return MeshPatch(X, u, v, (u1 - u0) / nu, params, chart, sheets)


def end_period(params, chart, index=0, radius=None, n=512):
    """Translation period of the loop around one end (trapezoid rule on a circle)."""
    ends = end_positions(params, chart)
    e = ends[index]
    tiled = _ends_tiled(params, chart, ends)
    others = tiled[np.abs(tiled - e) > 1e-9]
    if radius is None:
        radius = 0.3 * float(np.min(np.abs(others - e)))
    t = 2 * np.pi * np.arange(n) / n
    zeta = e + radius * np.exp(1j * t)
    dz = 1j * radius * np.exp(1j * t) * (2 * np.pi / n)
    vals = immersion_integrand(params, chart, zeta)
    return np.real(np.sum(vals * dz[:, None], axis=0))


def period_T(params):
    """Horizontal period ``T = (0, pi mu t, 0)`` for the ``beta = 0`` or ``alpha = 0`` families."""
    s = np.sin(params.sigma)
    if params.beta == 0.0:
        t = s / np.sqrt(s**2 * np.cos(params.alpha) ** 2 + np.sin(params.alpha) ** 2)
    elif params.alpha == 0.0:
        t = s / np.sqrt(s**2 - np.sin(params.beta) ** 2)
    else:
        raise DomainError("closed-form period only for beta = 0 or alpha = 0")
    return np.array([0.0, np.pi * params.mu * t, 0.0])


def chart_periods(params, chart, v_base=0.0, u_base=None, steps=2048):
    """Translations along the closed ``u``-loop and along one ``v``-period.

    Returns
    -------
    dict
        ``u_loop``: ``X(u + U, v_base) - X(u, v_base)``;
        ``v_shift``: ``X(u_base, v + V) - X(u_base, v)``.
    """
    ends = _ends_tiled(params, chart)
    if u_base is None:
        # a vertical line at maximal distance from the ends
        cand = np.linspace(0, chart.U_sigma, 64, endpoint=False)
        dist = [np.min(np.abs(ends.real - c)) for c in cand]
        u_base = float(cand[int(np.argmax(dist))])
    upts = np.linspace(0, chart.U_sigma, steps + 1) + 1j * v_base
    vpts = u_base + 1j * (v_base + np.linspace(0, chart.V_sigma, steps + 1))
    u_loop = _line_integral(params, chart, upts)[-1].real
    v_shift = _line_integral(params, chart, vpts)[-1].real
    return {"u_loop": u_loop, "v_shift": v_shift, "u_base": u_base}


@dataclass(frozen=True)
class GraphExpansion:
    """Vertical-graph model on an annulus around a catenoidal neck.

    ``U(r, theta) = -c log(2 r / s) + r (k1 cos - k2 sin) - (c / r)(x1 cos + x2 sin) + d + dressing``

    where ``c = logCoeff`` and ``s = log_scale`` (``1 + gamma`` for dilated
    KMR pieces, ``1`` otherwise).
    """

    logCoeff: float
    tilt: tuple = (0.0, 0.0)
    translation: tuple = (0.0, 0.0)
    offset: float = 0.0
    boundaryRadius: float = 1.0
    dressing: object = None
    dressing_kind: str = "none"
    remainderBudget: float = 0.0
    log_scale: float = 1.0

    def __post_init__(self):
        if self.boundaryRadius <= 0:
            raise DomainError("boundaryRadius must be positive")
        if self.remainderBudget < 0:
            raise DomainError("remainderBudget must be non-negative")

    def _dressing_field(self):
        from .harmonic import extend_exterior, extend_interior

        if self.dressing is None or self.dressing_kind == "none":
            return None
        if self.dressing_kind == "exterior":
            return extend_exterior(self.boundaryRadius, self.dressing)
        if self.dressing_kind == "interior":
            return extend_interior(self.boundaryRadius, self.dressing)
        raise DomainError(f"unknown dressing kind {self.dressing_kind!r}")

    def __call__(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        k1, k2 = self.tilt
        x1, x2 = self.translation
        c = self.logCoeff
        val = (
            -c * np.log(2 * r / self.log_scale)
            + r * (k1 * np.cos(theta) - k2 * np.sin(theta))
            - (c / r) * (x1 * np.cos(theta) + x2 * np.sin(theta))
            + self.offset
        )
        f = self._dressing_field()
        return val + (f(r, theta) if f is not None else 0.0)

    def d_r(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        k1, k2 = self.tilt
        x1, x2 = self.translation
        c = self.logCoeff
        val = -c / r + (k1 * np.cos(theta) - k2 * np.sin(theta)) + (c / r**2) * (
            x1 * np.cos(theta) + x2 * np.sin(theta)
        )
        f = self._dressing_field()
        return val + (f.d_r(r, theta) if f is not None else 0.0)


def catenoidal_expansion(params, gamma=0.0, xi=(0.0, 0.0, 0.0), eps=None, budget_constant=1.0, tilt="stated"):
    """Vertical-graph expansion of the dilated and translated KMR example.

    ``-(1+gamma) log(2r/(1+gamma)) + r(k1 cos - k2 sin) - ((1+gamma)/r)(xi1 cos + xi2 sin) + xi3``,
    valid on ``1/(4 sqrt(eps)) < r < 4/sqrt(eps)``.

    Parameters
    ----------
    tilt : {"stated", "measured"}
        ``"stated"`` uses ``(k1, k2) = (Re b + Im b, Re b - Im b)``.
        ``"measured"`` halves both, which is the slope found by direct
        Weierstrass evaluation and restores an ``O(eps)`` remainder.
    """
    if tilt not in ("stated", "measured"):
        raise DomainError(f"unknown tilt convention {tilt!r}")
    scale = 1.0 if tilt == "stated" else 0.5
    if eps is None:
        eps = params.sigma + params.alpha + params.beta
    if params.sigma + params.alpha + params.beta > eps * (1 + 1e-12) or not (0 < eps < 0.5):
        raise ScaleError("expansion needs alpha + beta + sigma <= eps small")
    c = 1.0 + gamma
    return GraphExpansion(
        logCoeff=c,
        tilt=(scale * params.kappa1, scale * params.kappa2),
        translation=(float(xi[0]), float(xi[1])),
        offset=float(xi[2]),
        boundaryRadius=0.5 / np.sqrt(eps),
        remainderBudget=budget_constant * eps,
        log_scale=c,
    )


def expansion_error(params, eps, h=None, gamma=0.0, xi=(0.0, 0.0, 0.0), tilt="stated"):
    """Max ``|X_3 - U(r, theta)|`` over the graph annulus, from direct Weierstrass evaluation.

    The translation left free by the expansion is fixed by matching the means of
    ``X_1 + i X_2 + (z + 1/conj z)/2`` and ``X_3 - log|z|`` on the circle
    ``|z| = sqrt(eps)``. The dilation and translation are then applied to the
    evaluated points.

    Returns
    -------
    dict
        ``max_error``, number of samples, radial range covered.
    """
    chart = build_chart(params.sigma)
    # band of chart ordinates covering sqrt(eps)/4 <= |z| <= 4 sqrt(eps) on sheet one
    v_a = float(chart.v_of_y(np.pi - 2 * np.arctan(4 * np.sqrt(eps) * 1.6)))
    v_b = float(chart.v_of_y(np.pi - 2 * np.arctan(np.sqrt(eps) / 4 / 1.6)))
    if h is None:
        h = min(0.02, (v_b - v_a) / 200)
    patch = evaluate_patch(params, chart, (0.0, chart.U_sigma, v_a, v_b), h, margin=1e-3)
    U, V = np.meshgrid(patch.u, patch.v)
    z = chart.z_of(U, V)
    X = patch.points
    horiz = X[..., 0] + 1j * X[..., 1]
    lead_h = -0.5 * (z + 1 / np.conj(z)) - (1 + 1j) * np.conj(params.b) / (4 * np.conj(z) ** 2)
    # normalization on the seam circle |z| = sqrt(eps)
    ring = np.abs(np.abs(z) / np.sqrt(eps) - 1) < 0.05
    if not np.any(ring):
        raise KmrGlueError("seam circle not sampled; refine h")
    horiz = horiz - np.mean((horiz - lead_h)[ring])
    x3 = X[..., 2] - np.mean((X[..., 2] - np.log(np.abs(z)))[ring])
    c = 1.0 + gamma
    horiz = c * horiz + (xi[0] + 1j * xi[1])
    x3 = c * x3 + xi[2]
    r = np.abs(horiz)
    theta = np.angle(horiz)
    model = catenoidal_expansion(params, gamma, xi, eps, tilt=tilt)
    sel = (r > 1 / (4 * np.sqrt(eps))) & (r < 4 / np.sqrt(eps))
    err = np.abs(x3 - model(r, theta))[sel]
    return {"max_error": float(np.max(err)), "samples": int(sel.sum()), "r_range": (float(r[sel].min()), float(r[sel].max()))}


def normal_graph_energy_density(f, f_p, f_q, Lambda, K, cos_g1, cos_g2):
    """``E_f G_f - F_f^2`` for the normal graph ``Z + f N`` in conformal coordinates.

    Parameters
    ----------
    f, f_p, f_q : array_like
        Graph function and its derivatives in the conformal coordinates ``(p, q)``.
    Lambda : array_like
        Conformal factor ``|Z_p|^2 = |Z_q|^2``.
    K : array_like
        Gauss curvature (non-positive).
    cos_g1, cos_g2 : array_like
        Cosines of the angles between ``N_p`` and ``Z_p``, resp. ``Z_q``.
    """
    root = np.sqrt(-np.asarray(K, dtype=float))
    return (
        Lambda**2
        + Lambda * (f_p**2 + f_q**2)
        + 2 * K * Lambda**2 * f**2
        + 2 * f * (f_q**2 - f_p**2) * root * Lambda * cos_g1
        - 4 * f * f_p * f_q * root * Lambda * cos_g2
        - K * Lambda * f**2 * (f_p**2 + f_q**2)
        + f**4 * K**2 * Lambda**2
    )


def jacobi_factor(params, chart, u, v):
    """``-K / k`` (inverse conformal factor of the induced metric in the chart)."""
    z = chart.z_of(u, v)
    g = params.gauss_map(z)
    c = abs(dh_dzeta(params))
    lam_metric = (c / 2 * (np.abs(g) + 1 / np.abs(g))) ** 2
    return 1.0 / lam_metric


def sqrt_k_gradients(sigma, chart, u, v):
    """``(d_u sqrt k, d_v sqrt k)`` evaluated exactly in the chart."""
    x = chart.x_of_u(u)
    y = chart.y_of_v(v)
    k = k_factor(x, y, sigma)
    sk = np.sqrt(k)
    du = l_factor(x, sigma) * (-np.sin(sigma) ** 2 * np.sin(x) * np.cos(x)) / sk
    dv = m_factor(y, sigma) * (np.cos(sigma) ** 2 * np.sin(y) * np.cos(y)) / sk
    return du, dv


def mean_curvature_order(params, region, h0, levels=3):
    """Grid-refinement study of the discrete mean curvature of ``evaluate_patch`` meshes.

    Returns
    -------
    list of dict
        Per level ``h``, ``max_residual``, ``l2_residual``, ``order_estimate``.
    """
    chart = build_chart(params.sigma)
    rows = []
    prev = None
    # evaluate at a common set of physical chart points: nested grids
    for k in range(levels):
        h = h0 / 2**k
        patch = evaluate_patch(params, chart, region, h)
        H = mean_curvature_grid(patch.points, patch.h, patch.v[1] - patch.v[0])
        step = 2**k
        Hc = H[step - 1 :: step, step - 1 :: step]
        mx = float(np.max(np.abs(Hc)))
        l2 = float(np.sqrt(np.mean(Hc**2)))
        order = float(np.log2(prev / mx)) if prev else float("nan")
        rows.append({"h": patch.h, "max_residual": mx, "l2_residual": l2, "order_estimate": order})
        prev = mx
    return rows
