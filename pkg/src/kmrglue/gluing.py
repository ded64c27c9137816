"""Cauchy-data matching of end models along seam circles.

Each seam pairs an *inner* model (dressing ``psi``, interior extension) with
an *outer* model (dressing ``phi``, exterior extension). For a mode
``j >= 1`` the gaps ``outer - inner`` read

* value:        ``phi_j - psi_j + R_j``
* ``r d_r``:    ``-j (phi_j + psi_j) + R'_j``

so the boundary data are updated from the gaps directly, while modes ``0``
and ``1`` that cannot be absorbed by boundary data are handed to a small
least-squares parameter system solved by damped Newton steps.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, OrthogonalityError, TrustRegionError
from .harmonic import FourierBoundary
from .kmr import SurfaceParams
from .model_graphs import chm_end_graph, flat_annulus, kmr_boundary_graph, scherk_period, scherk_solve, seam_radius

__all__ = [
    "THEOREMS",
    "PARAMETER_NAMES",
    "DATA_NAMES",
    "GluingConfig",
    "MatchingState",
    "SeamGap",
    "seam_mismatch",
    "invert_dtheta",
    "project_matching",
    "solve_matching",
    "write_trace_csv",
]

THEOREMS = ("self_test", "th1", "th2_K1", "th2_K2", "th3_k0", "th3_kpos")
PARAMETER_NAMES = ("lambda_t", "lambda_b", "eta_t", "eta_b", "xi_t", "xi_b", "kappa_t", "kappa_b")
DATA_NAMES = ("phi_t", "phi_b", "phi_m", "psi_t", "psi_b", "psi_m")
SEAMS = ("t", "b", "m")


@dataclass(frozen=True)
class GluingConfig:
    """Configuration of a matching run.

    Parameters
    ----------
    theorem : str
        One of :data:`THEOREMS`.
    genus : int
        Genus of the central piece (bookkeeping only; its interior is not modeled).
    eps : float
        Scale, at most ``eps_max``.
    truncation : int
        Shared Fourier truncation ``N``.
    tolerance : float
        Stop when the largest update of parameters and data falls below it.
    max_iter : int
    trust : float
        Iterates must stay in the ball ``|.| <= trust * eps``.
    tilt : {"stated", "measured"}
        KMR slope convention.
    """

    theorem: str = "th1"
    genus: int = 1
    eps: float = 1e-2
    truncation: int = 16
    tolerance: float = 1e-10
    max_iter: int = 50
    trust: float = 50.0
    eps_max: float = 1e-2
    tilt: str = "stated"
    scherk_grid: tuple = (320, 128)

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise DomainError(f"unknown theorem tag {self.theorem!r}")
        if not (0 < self.eps <= self.eps_max):
            raise DomainError("eps must lie in (0, eps_max]")
        if not (2 <= self.truncation <= 32):
            raise DomainError("truncation must lie in 2..32")
        if self.genus < 0:
            raise DomainError("genus must be non-negative")
        if self.theorem == "th3_k0" and self.genus != 0:
            raise DomainError("th3_k0 has no central piece; use genus 0")
        if self.tilt not in ("stated", "measured"):
            raise DomainError("tilt must be 'stated' or 'measured'")

    @property
    def parity(self):
        return "odd" if self.theorem == "th2_K1" else "even"


@dataclass
class MatchingState:
    """Parameters, boundary data and seam residuals of a matching run."""

    parameters: dict
    boundaryData: dict
    seamRadius: float
    seamResidual: dict
    iterations: int = 0
    converged: bool = False
    trace: list = field(default_factory=list)
    theorem: str = ""
    eps: float = 0.0

    @property
    def c1_residual(self):
        return max((v["c1"] for v in self.seamResidual.values()), default=0.0)

    @property
    def c0_residual(self):
        return max((v["c0"] for v in self.seamResidual.values()), default=0.0)

    @property
    def residual_constant(self):
        """``C`` in ``C1 residual = C * eps``."""
        return self.c1_residual / self.eps if self.eps else float("nan")

    def report(self):
        lines = [
            f"theorem = {self.theorem}",
            f"eps = {self.eps!r}",
            f"converged = {self.converged}",
            f"iterations = {self.iterations}",
            f"seam_radius = {self.seamRadius!r}",
            f"c0_residual = {self.c0_residual!r}",
            f"c1_residual = {self.c1_residual!r}",
            f"residual_constant = {self.residual_constant!r}",
        ]
        lines += [f"param.{k} = {v!r}" for k, v in self.parameters.items()]
        lines += [f"data_norm.{k} = {v.sup_norm()!r}" for k, v in self.boundaryData.items()]
        for seam, res in self.seamResidual.items():
            lines += [f"seam.{seam}.{k} = {v!r}" for k, v in res.items()]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- seam algebra


@dataclass(frozen=True)
class SeamGap:
    """Fourier coefficients of ``outer - inner`` and of ``d_r outer - d_r inner`` on the seam.

    ``value`` and ``slope`` use the parity of the boundary data. For odd data
    the constant terms are kept in ``value_mean`` and ``slope_mean``;
    ``leak`` is the largest coefficient found in the other parity family.
    """

    value: FourierBoundary
    slope: FourierBoundary
    value_mean: float
    slope_mean: float
    leak: float
    radius: float

    def __iter__(self):
        yield self.value
        yield self.slope


def _coefficients(samples, theta, n, parity):
    m = theta.size
    j = np.arange(n + 1)
    w = np.where(j == 0, 1.0, 2.0) / m
    cos_c = (samples @ np.cos(np.outer(theta, j))) * w
    sin_c = (samples @ np.sin(np.outer(theta, j))) * w
    return (cos_c, sin_c) if parity == "even" else (sin_c, cos_c)


def seam_mismatch(inner, outer, r_eps, n=16, samples=128):
    """Value and radial-derivative gaps ``outer - inner`` on the circle ``r = r_eps``.

    Raises
    ------
    OrthogonalityError
        If the two models carry boundary data of different parity.
    """
    if inner.parity != outer.parity:
        raise OrthogonalityError("seam models carry data of different parity")
    parity = inner.parity
    theta = (np.arange(samples) + 0.5) * 2 * np.pi / samples
    dv = outer(r_eps, theta) - inner(r_eps, theta)
    ds = outer.d_r(r_eps, theta) - inner.d_r(r_eps, theta)
    v_main, v_other = _coefficients(dv, theta, n, parity)
    s_main, s_other = _coefficients(ds, theta, n, parity)
    if parity == "odd":
        vm, sm = float(v_other[0]), float(s_other[0])
        leak = float(max(np.max(np.abs(v_other[1:])), np.max(np.abs(r_eps * s_other[1:]))))
        v_main[0] = s_main[0] = 0.0
    else:
        vm, sm = float(v_main[0]), float(s_main[0])
        leak = float(max(np.max(np.abs(v_other)), np.max(np.abs(r_eps * s_other))))
    return SeamGap(FourierBoundary(parity, v_main), FourierBoundary(parity, s_main), vm, sm, leak, float(r_eps))


def _dtheta(phi):
    """``d/dtheta`` of a series, returned in the opposite parity."""
    j = phi.modes
    c = phi.coefficients
    if phi.parity == "even":
        return FourierBoundary("odd", -j * c)
    out = j * c
    return FourierBoundary("even", out)


def invert_dtheta(g):
    """Solve ``d phi / d theta = g`` for mean-zero ``g``.

    ``c_j sin(j theta) -> -(c_j / j) cos(j theta)`` and
    ``c_j cos(j theta) -> (c_j / j) sin(j theta)``.

    Raises
    ------
    OrthogonalityError
        If ``g`` has a constant term.
    """
    c = g.coefficients
    if g.parity == "even" and abs(c[0]) > 0:
        raise OrthogonalityError("invert_dtheta needs mean-zero input")
    j = g.modes
    out = np.zeros_like(c)
    out[1:] = c[1:] / j[1:]
    if g.parity == "odd":
        return FourierBoundary("even", -out, frozenset({"perp1"}))
    return FourierBoundary("odd", out)


def project_matching(gaps):
    """Split seam gaps into the parameter equations and their orthogonal complement.

    Parameters
    ----------
    gaps : dict
        Seam name (``"t"``, ``"b"``, ``"m"``) -> :class:`SeamGap`.

    Returns
    -------
    params : ndarray, shape (8,)
        Ordered like :data:`PARAMETER_NAMES`: ``r d_r`` constant -> lambda,
        value constant -> eta, ``r d_r`` first mode -> xi, value first mode -> kappa.
    orthogonal : dict
        Seam name -> ``(value, r * slope)`` with the parameter components
        removed on the ``t`` and ``b`` seams. The middle seam has no
        parameter slots and passes through unchanged.
    """
    eqs = np.zeros(8)
    orth = {}
    for seam, gap in gaps.items():
        r = gap.radius
        val = gap.value.coefficients.copy()
        slo = r * gap.slope.coefficients.copy()
        if seam in ("t", "b"):
            k = 0 if seam == "t" else 1
            eqs[0 + k] = r * gap.slope_mean
            eqs[2 + k] = gap.value_mean
            eqs[4 + k] = slo[1] if slo.size > 1 else 0.0
            eqs[6 + k] = val[1] if val.size > 1 else 0.0
            val[: min(2, val.size)] = 0.0
            slo[: min(2, slo.size)] = 0.0
            vm = sm = 0.0
        else:
            vm, sm = gap.value_mean, r * gap.slope_mean
        if gap.value.parity == "even":
            val[0] = vm if seam == "m" else 0.0
            slo[0] = sm if seam == "m" else 0.0
        orth[seam] = (FourierBoundary(gap.value.parity, val), FourierBoundary(gap.value.parity, slo))
    return eqs, orth


def recombine(eqs, orth, radius):
    """Inverse of :func:`project_matching` as ``(value, r * slope, value_mean, r * slope_mean)`` per seam."""
    out = {}
    for seam, (val, slo) in orth.items():
        v = val.coefficients.copy()
        s = slo.coefficients.copy()
        vm = sm = 0.0
        if seam in ("t", "b"):
            k = 0 if seam == "t" else 1
            vm, sm = eqs[2 + k], eqs[0 + k]
            v[1] += eqs[6 + k]
            s[1] += eqs[4 + k]
            if val.parity == "even":
                v[0], s[0] = vm, sm
        elif val.parity == "even":
            vm, sm = v[0], s[0]
        out[seam] = (v, s, vm, sm)
    return out


# ---------------------------------------------------------------- configurations


_INNER_FLAGS = {"chm_edge": ("perp_e01",), "chm_mid": ("perp1",), "kmr": ("perp_e01",)}


class _Layout:
    """Builds the seam models of one configuration from parameters and data."""

    def __init__(self, cfg):
        self.cfg = cfg
        eps = cfg.eps
        self.eps = eps
        self.r = seam_radius(eps)
        self.parity = cfg.parity
        self._scherk_cache = {}
        th = cfg.theorem
        odd = self.parity == "odd"
        self.kmr_params = SurfaceParams(eps / 2, 0.0, eps / 4) if odd else SurfaceParams(eps / 2, eps / 4, 0.0)
        self.kmr_family = "alpha0" if odd else "beta0"
        self.directions = (eps / 2, eps / 2)
        if th == "th3_k0":
            self.directions = _directions_for_slope(eps / 2, self._kmr_slope())
        self.L = scherk_period(*self.directions)
        # per seam: (inner flags, outer flags); None marks a side without free data
        edge_in = ("perp_e01",) if not odd else ("perpsin",)
        if th == "self_test":
            self.seams = {"t": (edge_in, edge_in), "b": (edge_in, edge_in), "m": (("perp1",), ("perp1",))}
            self.params = ("eta_t", "eta_b")
        elif th == "th1":
            self.seams = {"t": (edge_in, ("perp1",)), "b": (edge_in, ("perp1",)), "m": (("perp1",), ("perp1",))}
            self.params = ("eta_t", "eta_b")
        elif th in ("th2_K1", "th2_K2"):
            kmr_out = ("perp_e01",) if not odd else ("perpsin",)
            self.seams = {"t": (edge_in, kmr_out), "b": (edge_in, kmr_out), "m": (("perp1",), ("perp1",))}
            self.params = PARAMETER_NAMES
        elif th == "th3_k0":
            self.seams = {"t": (("perp_e01",), ("perp1",))}
            self.params = ("eta_t",)
        else:  # th3_kpos
            self.seams = {"t": (edge_in, ("perp_e01",)), "b": (edge_in, ("perp1",)), "m": (("perp1",), ("perp1",))}
            self.params = ("lambda_t", "eta_t", "xi_t", "kappa_t", "eta_b")

    def _scherk(self, phi, orientation):
        key = (orientation, phi.coefficients.tobytes())
        if key not in self._scherk_cache:
            n_r, n_t = self.cfg.scherk_grid
            self._scherk_cache[key] = scherk_solve(
                self.directions, self.L, self.eps, phi, orientation=orientation, n_r=n_r, n_theta=n_t
            )
        return self._scherk_cache[key]

    def _kmr_slope(self):
        probe = kmr_boundary_graph(
            self.kmr_family, self.kmr_params, 0.0, (0.0, 0.0), 0.0, FourierBoundary.zeros(2, self.parity), self.eps, tilt=self.cfg.tilt
        )
        return probe.expansion.tilt[0]

    def _kmr(self, p, side, phi, dressing="exterior"):
        gamma = p.get(f"lambda_{side}", 0.0)
        xi = p.get(f"xi_{side}", 0.0)
        xi_pair = (xi, 0.0) if self.parity == "even" else (0.0, xi)
        d = p.get(f"eta_{side}", 0.0)
        kap = p.get(f"kappa_{side}", 0.0)
        if side == "b":
            model = kmr_boundary_graph(
                self.kmr_family, self.kmr_params, gamma, xi_pair, -d, phi * -1.0, self.eps, kappa_shift=-kap, dressing=dressing, tilt=self.cfg.tilt
            )
            return model.reflect()
        return kmr_boundary_graph(
            self.kmr_family, self.kmr_params, gamma, xi_pair, d, phi, self.eps, kappa_shift=kap, dressing=dressing, tilt=self.cfg.tilt
        )

    def models(self, p, data):
        """Seam name -> (inner, outer) models."""
        eps, th, par = self.eps, self.cfg.theorem, self.parity
        out = {}
        for seam in self.seams:
            psi = data[f"psi_{seam}"]
            phi = data[f"phi_{seam}"]
            if seam == "m":
                inner = chm_end_graph("middle", eps, psi, parity=par)
                outer = flat_annulus(eps, phi) if th != "self_test" else chm_end_graph("middle", eps, phi, dressing="exterior", parity=par)
                out[seam] = (inner, outer)
                continue
            end = "top" if seam == "t" else "bottom"
            eta = p.get(f"eta_{seam}", 0.0)
            if th == "self_test":
                inner = chm_end_graph(end, eps, psi, parity=par)
                outer = chm_end_graph(end, eps, phi, sigma_end=eta, dressing="exterior", parity=par)
            elif th == "th1":
                inner = chm_end_graph(end, eps, psi, sigma_end=-eta, tilt=0.0, parity=par)
                outer = self._scherk(phi, "up" if seam == "t" else "down")
            elif th in ("th2_K1", "th2_K2"):
                inner = chm_end_graph(end, eps, psi, parity=par)
                outer = self._kmr(p, seam, phi)
            elif th == "th3_k0":
                inner = self._kmr({"eta_t": -eta}, "t", psi, dressing="interior")
                outer = self._scherk(phi, "up")
            else:  # th3_kpos
                if seam == "t":
                    inner = chm_end_graph("top", eps, psi, parity=par)
                    outer = self._kmr(p, "t", phi)
                else:
                    inner = chm_end_graph("bottom", eps, psi, sigma_end=-eta, tilt=0.0, parity=par)
                    outer = self._scherk(phi, "down")
            out[seam] = (inner, outer)
        return out


def _directions_for_slope(mean, slope):
    """Directions ``(mean - d, mean + d)`` whose Scherk model has ``x_1``-slope ``slope``."""
    from scipy.optimize import brentq

    if slope == 0:
        return (mean, mean)
    f = lambda d: 0.5 * (np.tan(mean + d) - np.tan(mean - d)) - abs(slope)
    d = brentq(f, 0.0, mean * (1 - 1e-9))
    return (mean - d, mean + d) if slope > 0 else (mean + d, mean - d)


def _free_modes(flags, n, parity):
    probe = FourierBoundary(parity, np.zeros(1))
    zero = probe._forced_zero(frozenset(flags))
    first = 1
    return np.array([j for j in range(first, n + 1) if j not in zero], dtype=int)


def _sup_residuals(inner, outer, r, samples=512):
    theta = np.arange(samples) * 2 * np.pi / samples
    c0 = float(np.max(np.abs(outer(r, theta) - inner(r, theta))))
    c1 = float(np.max(np.abs(outer.d_r(r, theta) - inner.d_r(r, theta))))
    return {"c0": c0, "slope": c1, "c1": max(c0, c1)}


def _param_residual(gaps, r):
    vec = []
    for seam in sorted(gaps):
        g = gaps[seam]
        v = g.value.coefficients
        s = g.slope.coefficients
        vec += [g.value_mean, r * g.slope_mean, v[1], r * s[1]]
    return np.array(vec)


def solve_matching(config, trace_path=None):
    """Alternating fixed point for boundary data and parameters.

    Each iteration (a) updates the boundary data of every seam from the gaps
    of the free modes and (b) takes one damped Gauss-Newton step on the
    parameters, with a finite-difference Jacobian of the mode ``0`` and ``1``
    gaps. The run stops when the largest update falls below
    ``config.tolerance``.

    Returns
    -------
    MatchingState

    Raises
    ------
    TrustRegionError
        If parameters or data leave the ball of radius ``trust * eps``.
    ConvergenceError
        If the iteration cap is reached (the trace is attached).
    """
    cfg = config
    lay = _Layout(cfg)
    n = cfg.truncation
    par = cfg.parity
    r = lay.r
    p = {k: 0.0 for k in lay.params}
    data = {k: FourierBoundary.zeros(n, par) for k in DATA_NAMES}
    free = {
        seam: (_free_modes(fi, n, par), _free_modes(fo, n, par)) for seam, (fi, fo) in lay.seams.items()
    }
    bound = cfg.trust * cfg.eps
    trace = []

    def gaps_for(pp, dd):
        models = lay.models(pp, dd)
        return {seam: seam_mismatch(inner, outer, r, n) for seam, (inner, outer) in models.items()}, models

    def objective(pp, dd):
        g, _ = gaps_for(pp, dd)
        return _param_residual(g, r)

    converged = False
    it = 0
    prev_data_step = None
    for it in range(1, cfg.max_iter + 1):
        gaps, _ = gaps_for(p, data)
        # (a) boundary data
        data_step = 0.0
        new = dict(data)
        for seam, gap in gaps.items():
            fin, fout = free[seam]
            psi = data[f"psi_{seam}"].coefficients.copy()
            phi = data[f"phi_{seam}"].coefficients.copy()
            V = gap.value.coefficients
            S = r * gap.slope.coefficients
            both = np.intersect1d(fin, fout)
            if both.size:
                dsum = _sum_from_slope(S, both, par)
                ddiff = -V[both]
                phi[both] += 0.5 * (dsum + ddiff)
                psi[both] += 0.5 * (dsum - ddiff)
            for j in np.setdiff1d(fout, fin):
                phi[j] += (-V[j] + j * S[j]) / (1 + j * j)
            for j in np.setdiff1d(fin, fout):
                psi[j] += (V[j] + j * S[j]) / (1 + j * j)
            fi, fo = lay.seams[seam]
            new_psi = FourierBoundary(par, FourierBoundary._apply_flags(psi, par, fi), frozenset(fi))
            new_phi = FourierBoundary(par, FourierBoundary._apply_flags(phi, par, fo), frozenset(fo))
            data_step = max(
                data_step,
                float(np.max(np.abs(new_psi.coefficients - data[f"psi_{seam}"].coefficients))),
                float(np.max(np.abs(new_phi.coefficients - data[f"phi_{seam}"].coefficients))),
            )
            new[f"psi_{seam}"] = new_psi
            new[f"phi_{seam}"] = new_phi
        data = new
        # (b) parameters
        param_step = 0.0
        if lay.params:
            p, param_step = _newton_step(objective, p, data, lay.params, cfg.eps)
        # diagnostics
        gaps, models = gaps_for(p, data)
        res = {seam: _sup_residuals(i, o, r) for seam, (i, o) in models.items()}
        for seam, gap in gaps.items():
            res[seam]["leak"] = gap.leak
        c0 = max(v["c0"] for v in res.values())
        c1 = max(v["c1"] for v in res.values())
        pnorm = max((abs(v) for v in p.values()), default=0.0)
        dnorm = max(d.sup_norm() for d in data.values())
        ratio = data_step / prev_data_step if prev_data_step else float("nan")
        prev_data_step = data_step if data_step > 0 else None
        trace.append(
            {
                "iter": it,
                "param_norm": pnorm / cfg.eps,
                "data_norm": dnorm,
                "c0_residual": c0,
                "c1_residual": c1,
                "data_step": data_step,
                "param_step": param_step,
                "data_contraction": ratio,
            }
        )
        if pnorm > bound or dnorm > bound:
            _write(trace, trace_path)
            raise TrustRegionError("iterates left the trust region", trace)
        if max(data_step, param_step) < cfg.tolerance:
            converged = True
            break
    _write(trace, trace_path)
    state = MatchingState(
        parameters={k: float(p.get(k, 0.0)) for k in PARAMETER_NAMES},
        boundaryData=data,
        seamRadius=float(r),
        seamResidual=res,
        iterations=it,
        converged=converged,
        trace=trace,
        theorem=cfg.theorem,
        eps=cfg.eps,
    )
    if not converged:
        raise ConvergenceError("matching did not converge within the iteration cap", trace)
    return state


def _sum_from_slope(S, modes, parity):
    """``phi + psi`` increments on ``modes`` that cancel the ``r d_r`` gap ``S``.

    The gap ``-j (phi_j + psi_j)`` is ``d/dtheta`` of ``phi + psi`` up to a
    quarter turn, so the update is ``invert_dtheta`` of the rotated series.
    """
    rotated = np.zeros(S.size)
    if parity == "even":
        rotated[modes] = -S[modes]
        out = invert_dtheta(FourierBoundary("odd", rotated)).coefficients
    else:
        rotated[modes] = S[modes]
        out = invert_dtheta(FourierBoundary("even", rotated)).coefficients
    return out[modes]


def _newton_step(objective, p, data, names, eps, damping=0.5, backtracks=5):
    """One damped Gauss-Newton step on the named parameters."""
    x = np.array([p[k] for k in names])
    f0 = objective(p, data)
    h = 1e-6 * max(eps, 1e-8)
    J = np.empty((f0.size, x.size))
    for k, name in enumerate(names):
        q = dict(p)
        q[name] = p[name] + h
        J[:, k] = (objective(q, data) - f0) / h
    dx, *_ = np.linalg.lstsq(J, -f0, rcond=None)
    base = float(np.linalg.norm(f0))
    step = 1.0
    for _ in range(backtracks + 1):
        trial = dict(zip(names, x + step * dx))
        try:
            val = float(np.linalg.norm(objective(trial, data)))
        except Exception:
            val = np.inf
        if val <= base * (1 + 1e-12):
            return trial, float(np.max(np.abs(step * dx))) if dx.size else 0.0
        step *= damping
    return dict(p), 0.0


def _write(trace, path):
    if path is not None:
        write_trace_csv(trace, path)


def write_trace_csv(trace, path):
    """Per-iteration CSV: iter, param_norm, data_norm, c0_residual, c1_residual."""
    cols = ("iter", "param_norm", "data_norm", "c0_residual", "c1_residual")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in trace:
            w.writerow([row["iter"]] + [repr(float(row[c])) for c in cols[1:]])
