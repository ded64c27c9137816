import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_bvp
from scipy.interpolate import CubicSpline

from kmrglue.coords import build_chart
from kmrglue.errors import DomainError
from kmrglue.jacobi import (
    PolarGrid,
    catenoid_jacobi,
    catenoid_kernel_fields,
    dirichlet_exterior_solve,
    dirichlet_injectivity_margin,
    lame_apply,
    legendre_kernel_residual,
    plane_jacobi,
    reduced_spectrum,
    right_inverse_halfcylinder,
)


@pytest.mark.parametrize("name", ["dilation", "translation"])
def test_catenoid_kernel(name):
    w, w_ss, w_tt = catenoid_kernel_fields()[name]
    s = np.linspace(-3, 3, 41)[:, None]
    t = np.linspace(0, 2 * np.pi, 17)[None, :]
    exact = catenoid_jacobi(w(s, t), s, t, w_ss(s, t), w_tt(s, t))
    fd = catenoid_jacobi(w, s, t)
    assert np.max(np.abs(exact)) < 1e-14
    assert np.max(np.abs(fd)) < 1e-9


def test_catenoid_constant():
    s = np.linspace(-2, 2, 9)
    out = catenoid_jacobi(lambda a, b: 1.0 + 0 * a, s, 0 * s)
    assert np.allclose(out, 2 / np.cosh(s) ** 4, atol=1e-10)


def test_catenoid_array_needs_derivatives():
    with pytest.raises(DomainError):
        catenoid_jacobi(np.ones(3), np.zeros(3), np.zeros(3))


def test_plane_jacobi_harmonic():
    x = np.linspace(0.5, 2, 7)
    y = np.linspace(-1, 1, 7)
    for v in (lambda a, b: a * a - b * b, lambda a, b: np.log(a * a + b * b), lambda a, b: a / (a * a + b * b)):
        assert np.max(np.abs(plane_jacobi(v, x, y))) < 1e-7
    r4 = (x * x + y * y) ** 2
    assert np.allclose(plane_jacobi(lambda a, b: a * a + b * b, x, y), 4 * r4, rtol=1e-8)


def test_lame_apply_constant_field():
    sigma = 0.4
    chart = build_chart(sigma)
    u = np.linspace(0, 2, 41)
    v = np.linspace(-1, 1, 41)
    out = lame_apply(np.ones((41, 41)), u, v, sigma, chart)
    U, V = np.meshgrid(u[2:-2], v[2:-2])
    k = np.sin(sigma) ** 2 * np.cos(chart.x_of_u(U)) ** 2 + np.cos(sigma) ** 2 * np.sin(chart.y_of_v(V)) ** 2
    assert np.allclose(out, 2 * k, atol=1e-12)


@given(st.floats(0.02, 1.5))
@settings(max_examples=20, deadline=None)
def test_low_eigenvalues_exact(sigma):
    sp = reduced_spectrum(sigma, N=4)
    assert sp.eigenvalue(0) == pytest.approx(-np.sin(sigma) ** 2, abs=1e-9)
    assert sp.eigenvalue(1) == pytest.approx(1 - 2 * np.sin(sigma) ** 2, abs=1e-9)
    odd = reduced_spectrum(sigma, N=4, parity="odd")
    assert odd.eigenvalue(1) == pytest.approx(1 - np.sin(sigma) ** 2, abs=1e-9)


@given(st.floats(0.02, 1.5))
@settings(max_examples=20, deadline=None)
def test_eigenvalue_bracket(sigma):
    sp = reduced_spectrum(sigma, N=12, check_bounds=False)
    base = (2 * np.pi * sp.indices / sp.U_sigma) ** 2
    gap = sp.eigenvalues - base
    assert np.all(gap <= 1e-8)
    assert np.all(gap >= -2 * np.sin(sigma) ** 2 - 1e-8)
    assert np.all(np.diff(sp.eigenvalues) > 0)


def test_eigenfunctions_near_cosines():
    dist = []
    for sigma in (0.05, 0.1):
        sp = reduced_spectrum(sigma, N=6)
        x = build_chart(sigma).x_of_u(sp.u_grid)
        row = []
        for i in (2, 3, 4):
            c = np.cos(i * x)
            c /= np.sqrt(np.mean(c * c) * sp.U_sigma)
            e = sp.evaluate(sp.u_grid, i)
            row.append(min(np.max(np.abs(e - c)), np.max(np.abs(e + c))))
        dist.append(row)
    ratio = np.array(dist[1]) / np.array(dist[0])
    assert np.all(np.abs(ratio - 4) < 0.2)


def test_spectrum_domain():
    with pytest.raises(DomainError):
        reduced_spectrum(np.pi / 2)
    with pytest.raises(DomainError):
        reduced_spectrum(0.3, N=33)


def test_projection_roundtrip():
    sp = reduced_spectrum(0.3, N=8)
    coef = np.arange(9, dtype=float) / 10
    samples = sum(c * sp.evaluate(sp.u_grid, i) for i, c in zip(sp.indices, coef))
    assert np.allclose(sp.project(samples), coef, atol=1e-10)


def _forcing(sp, n_v=4001, v0=1.0, span=20.0, mode=5):
    v = np.linspace(v0, v0 + span, n_v)
    F = np.zeros((sp.indices.size, n_v))
    F[mode] = np.exp(-1.7 * (v - v0)) * np.sin(3 * (v - v0))
    return v, F


def test_right_inverse_matches_bvp():
    sigma = 0.3
    sp = reduced_spectrum(sigma, N=8)
    v, F = _forcing(sp)
    sol = right_inverse_halfcylinder(sigma, 1.0, F, basis=sp)
    chart = build_chart(sigma)
    P = CubicSpline(v, 2 * np.cos(sigma) ** 2 * np.sin(chart.y_of_v(v)) ** 2 - sp.eigenvalue(5))
    Fs = CubicSpline(v, F[5])
    rate = np.sqrt(23.0)

    def rhs(x, y):
        return np.vstack([y[1], Fs(x) - P(x) * y[0]])

    def bc(ya, yb):
        return np.array([ya[0], yb[1] + rate * yb[0]])

    ref = solve_bvp(rhs, bc, v, np.zeros((2, v.size)), tol=1e-9, max_nodes=100000)
    assert ref.success
    assert np.max(np.abs(sol.modes[5] - ref.sol(v)[0])) < 5e-5 * np.max(np.abs(ref.sol(v)[0]))
    assert np.max(sol.mode_residual()) < 1e-8
    assert sol.weighted_norm(-1.5) < np.inf


def test_right_inverse_zero_and_domain():
    sp = reduced_spectrum(0.3, N=8)
    v, F = _forcing(sp)
    sol = right_inverse_halfcylinder(0.3, 1.0, 0 * F, basis=sp)
    assert np.all(sol.modes == 0)
    with pytest.raises(DomainError):
        right_inverse_halfcylinder(0.3, 1.0, F, mu=-0.5, basis=sp)
    grow = np.zeros_like(F)
    grow[3] = np.exp(0.5 * (v - 1.0))
    with pytest.raises(DomainError):
        right_inverse_halfcylinder(0.3, 1.0, grow, basis=sp)


def test_dirichlet_trace_vanishes_for_high_modes():
    sp = reduced_spectrum(0.3, N=8)
    v, F = _forcing(sp)
    sol = right_inverse_halfcylinder(0.3, 1.0, F, basis=sp)
    assert np.all(sol.modes[2:, 0] == 0)


@pytest.mark.parametrize("width", [2.0, 4.0, 8.0])
def test_injectivity_margin(width):
    assert dirichlet_injectivity_margin(0.3, 1.0, width) > 2.0


def test_exterior_mode_oracle():
    s = 1.0
    grid = PolarGrid(s, n_r=800)
    sol = dirichlet_exterior_solve(s, lambda r, t: r**-4 * np.cos(2 * t), grid)
    rho = np.geomspace(1.2, 50, 9)
    th = 0.37
    exact = -0.25 * rho**-2 * np.log(rho / s) * np.cos(2 * th)
    assert np.max(np.abs(sol(rho, th) - exact)) < 1e-5


def test_exterior_radial_oracle():
    s = 0.5
    grid = PolarGrid(s, n_r=800)
    R = grid.rho[-1]
    sol = dirichlet_exterior_solve(s, lambda r, t: r**-4 + 0 * t, grid, normalize=False)
    rho = np.geomspace(0.6, 40, 9)
    exact = 0.25 * (rho**-2 - s**-2) + 0.5 * R**-2 * np.log(rho / s)
    # second-order in the log-radial step
    assert np.max(np.abs(sol(rho, 1.0) - exact)) < 1e-4


def test_exterior_zero_and_domain():
    sol = dirichlet_exterior_solve(1.0, lambda r, t: 0 * r * t)
    assert np.all(sol.on_grid() == 0)
    with pytest.raises(DomainError):
        dirichlet_exterior_solve(0.0, lambda r, t: r)


def test_legendre_residual_scales_with_sigma_squared():
    a = legendre_kernel_residual(1e-3, 2, v_max=2.0)["max_abs"]
    b = legendre_kernel_residual(2e-3, 2, v_max=2.0)["max_abs"]
    assert b / a == pytest.approx(4.0, rel=0.05)
