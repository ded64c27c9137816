"""Command-line front end.

Verbs: ``kmr-mesh``, ``spectrum``, ``scherk-solve``, ``glue``, ``verify``.
Configuration is an INI file with one section per verb; unknown keys are
rejected. Every command validates its inputs before any file is written.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

import argparse
import configparser
import csv
import io
import os
import sys

import numpy as np

from .errors import ConvergenceError, DomainError, KmrGlueError

__all__ = ["main", "DEFAULTS", "ValidationError", "run_verify"]


class ValidationError(Exception):
    """Invalid configuration or arguments."""


DEFAULTS = {
    "kmr-mesh": {"sigma": 0.3, "alpha": 0.2, "beta": 0.0, "u0": 0.3, "u1": 1.3, "v0": -0.5, "v1": 0.5, "h": 0.05},
    "spectrum": {"sigma": 0.3, "n": 8, "parity": "even", "n_grid": 256},
    "scherk-solve": {"theta1": 0.005, "theta2": 0.005, "period": 0.0, "epsilon": 0.01, "modes": "2:0.003", "h": 0.5},
    "glue": {"theorem": "th1", "genus": 1, "epsilon": 0.01, "truncation": 16, "tolerance": 1e-10, "max_iter": 50, "tilt": "stated", "mesh_points": 24},
    "verify": {"suite": "all", "inject_eigenvalue_shift": 0.0},
}


def _read_config(path, section):
    values = dict(DEFAULTS[section])
    if path is None:
        return values
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ValidationError(f"malformed config: {exc}") from exc
    for sec in parser.sections():
        if sec not in DEFAULTS:
            raise ValidationError(f"unknown config section [{sec}]")
    if parser.has_section(section):
        for key, raw in parser.items(section):
            if key not in values:
                raise ValidationError(f"unknown key {key!r} in [{section}]")
            default = DEFAULTS[section][key]
            try:
                values[key] = type(default)(raw) if not isinstance(default, str) else raw.strip()
            except ValueError as exc:
                raise ValidationError(f"bad value for {key}: {raw!r}") from exc
    return values


def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _write_obj(path, vertices, faces):
    with open(path, "w") as fh:
        for v in vertices:
            fh.write("v {:.12g} {:.12g} {:.12g}\n".format(*v))
        for f in faces:
            fh.write("f {} {} {}\n".format(*(int(i) + 1 for i in f)))


# ---------------------------------------------------------------- commands


def cmd_kmr_mesh(cfg, out):
    from .coords import build_chart
    from .kmr import SurfaceParams, end_period, evaluate_patch, period_T

    try:
        params = SurfaceParams(cfg["sigma"], cfg["alpha"], cfg["beta"])
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    if cfg["h"] <= 0:
        raise ValidationError("h must be positive")
    if params.alpha != 0 and params.beta != 0:
        raise ValidationError("period report needs alpha = 0 or beta = 0")
    chart = build_chart(params.sigma)
    patch = evaluate_patch(params, chart, (cfg["u0"], cfg["u1"], cfg["v0"], cfg["v1"]), cfg["h"])
    T = period_T(params)
    rows = []
    for k in range(4):
        P = end_period(params, chart, k)
        err = min(np.max(np.abs(P - T)), np.max(np.abs(P + T)))
        rows.append([k, *map(_fmt, P), *map(_fmt, T), _fmt(err)])
    os.makedirs(out, exist_ok=True)
    verts = patch.points.reshape(-1, 3)
    faces = patch.faces() if patch.points.size else np.zeros((0, 3), dtype=int)
    _write_obj(os.path.join(out, "kmr_mesh.obj"), verts, faces)
    _write_csv(os.path.join(out, "periods.csv"), ["end", "p1", "p2", "p3", "t1", "t2", "t3", "error"], rows)
    return 0


def spectrum_rows(sigma, n, parity, n_grid=256):
    """Rows ``i, lambda, lambda_minus_i_sq, lambda_minus_base``; ``sigma = 0`` gives the exact limit."""
    if sigma == 0.0:
        first = 0 if parity == "even" else 1
        return [[i, float(i * i), 0.0, 0.0] for i in range(first, n + 1)]
    from .jacobi import reduced_spectrum

    S = reduced_spectrum(sigma, n, parity, n_grid=n_grid)
    base = (2 * np.pi * S.indices / S.U_sigma) ** 2
    return [[int(i), float(l), float(l - i * i), float(l - b)] for i, l, b in zip(S.indices, S.eigenvalues, base)]


def cmd_spectrum(cfg, out):
    sigma, n, parity = cfg["sigma"], cfg["n"], cfg["parity"]
    if not (0 <= sigma < np.pi / 2):
        raise ValidationError("sigma must lie in [0, pi/2)")
    if not (0 <= n <= 32):
        raise ValidationError("N must lie in 0..32")
    if parity not in ("even", "odd"):
        raise ValidationError("parity must be even or odd")
    if cfg["n_grid"] % 2 or cfg["n_grid"] < 4 * (n + 2):
        raise ValidationError("n_grid must be even and at least 4 (N + 2)")
    rows = spectrum_rows(sigma, n, parity, cfg["n_grid"])
    os.makedirs(out, exist_ok=True)
    _write_csv(
        os.path.join(out, "spectrum.csv"),
        ["i", "lambda", "lambda_minus_i_sq", "lambda_minus_base"],
        [[r[0], *map(_fmt, r[1:])] for r in rows],
    )
    return 0


def _parse_modes(text, n):
    from .harmonic import FourierBoundary

    coef = np.zeros(n + 1)
    for item in filter(None, (t.strip() for t in text.split(","))):
        try:
            j, a = item.split(":")
            j = int(j)
            coef[j] = float(a)
        except (ValueError, IndexError) as exc:
            raise ValidationError(f"bad mode entry {item!r}; use j:amplitude with 1 <= j <= N") from exc
        if j < 1:
            raise ValidationError("mode 0 is not allowed (data must be mean-zero)")
    return FourierBoundary("even", coef, frozenset({"perp1"}))


def cmd_scherk_solve(cfg, out, truncation):
    from .model_graphs import flux, mean_curvature_residual, scherk_period, scherk_solve, seam_radius

    eps = cfg["epsilon"]
    if not (0 < eps < 1):
        raise ValidationError("epsilon must lie in (0, 1)")
    th1, th2 = cfg["theta1"], cfg["theta2"]
    phi = _parse_modes(cfg["modes"], truncation)
    try:
        L = cfg["period"] if cfg["period"] > 0 else scherk_period(th1, th2)
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    try:
        model = scherk_solve((th1, th2), L, eps, phi)
    except ConvergenceError:
        raise
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    s = seam_radius(eps)
    rows = mean_curvature_residual(model, "scherk_graph", (1.5 * s, 2.5 * s, -0.5 * s, 0.5 * s), cfg["h"], levels=3)
    os.makedirs(out, exist_ok=True)
    _write_csv(
        os.path.join(out, "scherk_trace.csv"), ["iter", "increment"], [[i, _fmt(d)] for i, d in model.info["trace"]]
    )
    _write_csv(
        os.path.join(out, "residual.csv"),
        ["h", "max_residual", "l2_residual", "order_estimate"],
        [[_fmt(r["h"]), _fmt(r["max_residual"]), _fmt(r["l2_residual"]), _fmt(r["order_estimate"])] for r in rows],
    )
    expected = -L * (np.sin(th1) + np.sin(th2))
    _write_csv(
        os.path.join(out, "flux.csv"),
        ["radius", "flux", "expected"],
        [[_fmt(r), _fmt(flux(model, r)), _fmt(expected)] for r in (s, 2 * s, 4 * s)],
    )
    return 0


def _seam_mesh(model, r0, r1, n):
    r = np.linspace(r0, r1, n)
    t = np.linspace(0, 2 * np.pi, 2 * n, endpoint=False)
    R, T = np.meshgrid(r, t, indexing="ij")
    verts = np.stack([R * np.cos(T), R * np.sin(T), model(R, T)], axis=-1).reshape(-1, 3)
    idx = np.arange(R.size).reshape(R.shape)
    nxt = np.roll(idx, -1, axis=1)
    a, b, c, d = idx[:-1], nxt[:-1], nxt[1:], idx[1:]
    faces = np.concatenate([np.stack([a.ravel(), b.ravel(), c.ravel()], 1), np.stack([a.ravel(), c.ravel(), d.ravel()], 1)])
    return verts, faces


def cmd_glue(cfg, out, eps, truncation):
    from .gluing import GluingConfig, _Layout, solve_matching, write_trace_csv

    try:
        gc = GluingConfig(
            theorem=cfg["theorem"],
            genus=cfg["genus"],
            eps=eps,
            truncation=truncation,
            tolerance=cfg["tolerance"],
            max_iter=cfg["max_iter"],
            tilt=cfg["tilt"],
        )
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    if cfg["mesh_points"] < 2:
        raise ValidationError("mesh_points must be at least 2")
    os.makedirs(out, exist_ok=True)
    trace_path = os.path.join(out, "matching_trace.csv")
    try:
        state = solve_matching(gc, trace_path=trace_path)
    except ConvergenceError as exc:
        write_trace_csv(exc.trace, trace_path)
        raise
    with open(os.path.join(out, "matching_report.txt"), "w") as fh:
        fh.write(state.report())
    models = _Layout(gc).models(state.parameters, state.boundaryData)
    r = state.seamRadius
    for seam, (inner, outer) in models.items():
        for tag, model, (a, b) in (("inner", inner, (0.5 * r, r)), ("outer", outer, (r, 2 * r))):
            verts, faces = _seam_mesh(model, a, b, cfg["mesh_points"])
            _write_obj(os.path.join(out, f"seam_{seam}_{tag}.obj"), verts, faces)
    return 0


# ---------------------------------------------------------------- verify


def _check_eigen(shift):
    from .jacobi import reduced_spectrum

    worst = 0.0
    for sigma in (0.05, 0.1, 0.3):
        S = reduced_spectrum(sigma, 8, check_bounds=False)
        gap = S.eigenvalues + shift - (2 * np.pi * S.indices / S.U_sigma) ** 2
        lo = -2 * np.sin(sigma) ** 2
        worst = max(worst, float(np.max(np.maximum(gap, 0.0))), float(np.max(np.maximum(lo - gap, 0.0))))
    return worst, 1e-8


def _check_catenoid():
    from .jacobi import catenoid_jacobi, catenoid_kernel_fields

    rng = np.linspace(-3, 3, 200)
    th = np.linspace(0, 2 * np.pi, 200)
    worst = 0.0
    for w, wss, wtt in catenoid_kernel_fields().values():
        worst = max(worst, float(np.max(np.abs(catenoid_jacobi(w(rng, th), rng, th, wss(rng, th), wtt(rng, th))))))
    return worst, 1e-10


def _check_harmonic(rng):
    from .harmonic import FourierBoundary, derivative_identity_exterior, derivative_identity_interior

    c = np.zeros(9)
    c[2:] = rng.normal(size=7)
    phi = FourierBoundary("even", c, frozenset({"perp1"}))
    a = derivative_identity_exterior(phi, 1.7)
    b = derivative_identity_interior(phi, 1.7)
    return max(a["max_violation"], b["max_violation"]), 1e-10


def _check_periods():
    from .coords import v_epsilon, v_period

    a = [v_epsilon(e, e) + 0.5 * np.log(e) for e in (1e-2, 1e-3, 1e-4)]
    b = [v_period(e) + 4 * np.log(e) for e in (1e-2, 1e-3, 1e-4)]
    return float(max(np.max(np.abs(np.diff(a))), np.max(np.abs(np.diff(b))))), 0.5


def _check_legendre():
    from .specfun import legendre_Q1_derivatives

    t = np.linspace(-0.95, 0.95, 101)
    worst = 0.0
    for j in range(0, 5):
        Q, dQ, d2Q = legendre_Q1_derivatives(j, t)
        res = (1 - t * t) * ((1 - t * t) * d2Q - 2 * t * dQ) - j * j * Q + 2 * (1 - t * t) * Q
        worst = max(worst, float(np.max(np.abs(res))))
    return worst, 1e-8


def _check_dtheta(rng):
    from .gluing import _dtheta, invert_dtheta
    from .harmonic import FourierBoundary

    c = np.concatenate([[0.0], rng.normal(size=16)])
    phi = FourierBoundary("even", c)
    back = invert_dtheta(_dtheta(phi))
    return float(np.max(np.abs(back.coefficients - c))), 1e-14


def _check_self_test():
    from .gluing import GluingConfig, solve_matching

    return solve_matching(GluingConfig("self_test")).c1_residual, 1e-12


def _check_flux():
    from .harmonic import FourierBoundary
    from .model_graphs import flux, scherk_period, scherk_solve, seam_radius

    eps = 1e-2
    th = eps / 2
    L = scherk_period(th, th)
    m = scherk_solve((th, th), L, eps, FourierBoundary.zeros(8, flags=("perp1",)))
    target = -2 * np.sin(th) * L
    return abs(flux(m, seam_radius(eps)) / target - 1), 1e-2


CHECKS = {
    "eigenvalue_bracket": lambda rng, shift: _check_eigen(shift),
    "catenoid_kernel": lambda rng, shift: _check_catenoid(),
    "harmonic_identities": lambda rng, shift: _check_harmonic(rng),
    "period_asymptotics": lambda rng, shift: _check_periods(),
    "legendre_ode": lambda rng, shift: _check_legendre(),
    "invert_dtheta_roundtrip": lambda rng, shift: _check_dtheta(rng),
    "gluing_self_test": lambda rng, shift: _check_self_test(),
    "scherk_flux": lambda rng, shift: _check_flux(),
}


def run_verify(suite, seed=0, shift=0.0):
    """Evaluate named checks; returns rows ``(name, passed, measured, threshold)``."""
    rng = np.random.default_rng(seed)
    rows = []
    for name in suite:
        measured, threshold = CHECKS[name](rng, shift)
        rows.append((name, bool(measured <= threshold), float(measured), float(threshold)))
    return rows


def cmd_verify(cfg, out, seed):
    text = cfg["suite"].strip()
    if text == "all":
        suite = list(CHECKS)
    else:
        suite = [t.strip() for t in text.split(",") if t.strip()]
        unknown = [t for t in suite if t not in CHECKS]
        if unknown:
            raise ValidationError(f"unknown checks {unknown}")
    rows = run_verify(suite, seed, cfg["inject_eigenvalue_shift"])
    os.makedirs(out, exist_ok=True)
    _write_csv(
        os.path.join(out, "verify.csv"),
        ["name", "passed", "measured", "threshold"],
        [[n, int(p), _fmt(m), _fmt(t)] for n, p, m, t in rows],
    )
    for n, p, m, t in rows:
        print(f"{'PASS' if p else 'FAIL'} {n} measured={m:.3e} threshold={t:.1e}")
    return 0


# ---------------------------------------------------------------- entry point


def build_parser():
    p = argparse.ArgumentParser(prog="kmrglue", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["kmr-mesh", "spectrum", "scherk-solve", "glue", "verify"])
    p.add_argument("--config", default=None, help="INI file with one section per command")
    p.add_argument("--out", default="kmrglue_out", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--truncation", type=int, default=None)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        cfg = _read_config(args.config, args.command)
        if args.truncation is not None and not (2 <= args.truncation <= 32):
            raise ValidationError("truncation must lie in 2..32")
        truncation = args.truncation if args.truncation is not None else cfg.get("truncation", 16)
        if args.epsilon is not None and not (0 < args.epsilon < 1):
            raise ValidationError("epsilon must lie in (0, 1)")
        if args.command == "kmr-mesh":
            return cmd_kmr_mesh(cfg, args.out)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.out)
        if args.command == "scherk-solve":
            if args.epsilon is not None:
                cfg["epsilon"] = args.epsilon
            return cmd_scherk_solve(cfg, args.out, truncation)
        if args.command == "glue":
            eps = args.epsilon if args.epsilon is not None else cfg["epsilon"]
            return cmd_glue(cfg, args.out, eps, truncation)
        return cmd_verify(cfg, args.out, args.seed)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except KmrGlueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
