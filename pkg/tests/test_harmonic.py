import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kmrglue.errors import DomainError, OrthogonalityError
from kmrglue.harmonic import (
    FourierBoundary,
    derivative_identity_exterior,
    derivative_identity_interior,
    extend_exterior,
    extend_halfcylinder,
    extend_interior,
    extend_shifted,
)
from kmrglue.jacobi import reduced_spectrum

TH = np.linspace(0, 2 * np.pi, 97)

coef_lists = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=12)


def _perp(c, k=1):
    c = np.array(c, dtype=float)
    c[:k] = 0.0
    return c


def test_flags_enforced():
    with pytest.raises(OrthogonalityError):
        FourierBoundary("even", [1.0, 0.0], frozenset({"perp1"}))
    with pytest.raises(OrthogonalityError):
        FourierBoundary("even", [0.0, 1.0], frozenset({"perpcos"}))
    with pytest.raises(OrthogonalityError):
        FourierBoundary("odd", [1.0, 0.0])
    with pytest.raises(DomainError):
        FourierBoundary("other", [0.0])
    with pytest.raises(DomainError):
        FourierBoundary("even", [0.0], frozenset({"bogus"}))


def test_from_samples_roundtrip():
    phi = FourierBoundary("even", [0.0, 0.2, -0.5, 0.1])
    back = FourierBoundary.from_samples(TH[:-1], phi(TH[:-1]), n=3)
    assert np.allclose(back.coefficients, phi.coefficients, atol=1e-13)
    odd = FourierBoundary("odd", [0.0, 0.3, 0.0, -0.2])
    back = FourierBoundary.from_samples(TH[:-1], odd(TH[:-1]), n=3, parity="odd")
    assert np.allclose(back.coefficients, odd.coefficients, atol=1e-13)


def test_exterior_examples():
    w = extend_exterior(1.0, FourierBoundary.mode(1, 4))
    assert np.allclose(w(2.5, TH), np.cos(TH) / 2.5, atol=1e-14)
    w = extend_exterior(2.0, FourierBoundary.mode(2, 4))
    assert np.allclose(w(3.0, TH), (2 / 3) ** 2 * np.cos(2 * TH), atol=1e-14)
    with pytest.raises(OrthogonalityError):
        extend_exterior(1.0, FourierBoundary.mode(0, 4))


def test_halfcylinder_examples():
    w = extend_halfcylinder(FourierBoundary.mode(2, 4))
    s = np.linspace(0, 5, 11)[:, None]
    assert np.allclose(w(s, TH), np.exp(-2 * s) * np.cos(2 * TH), atol=1e-14)
    assert np.max(np.abs(np.exp(2 * s) * w(s, TH))) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(OrthogonalityError):
        extend_halfcylinder(FourierBoundary.mode(1, 4))


def test_shifted_examples():
    w = extend_shifted(3.0, FourierBoundary.mode(2, 4))
    u = np.linspace(0, 2 * np.pi, 13)
    assert np.allclose(w(u, 4.0), np.exp(-2.0) * np.cos(2 * u), atol=1e-14)
    z = extend_shifted(3.0, FourierBoundary.zeros(4))
    assert np.all(z(u, 5.0) == 0)
    with pytest.raises(OrthogonalityError):
        extend_shifted(0.0, FourierBoundary.mode(1, 4))


def test_shifted_weighted_estimate():
    rng = np.random.default_rng(3)
    phi = FourierBoundary("even", _perp(rng.normal(size=9), 2))
    v0, mu = 3.0, -1.5
    w = extend_shifted(v0, phi)
    u = np.linspace(0, 2 * np.pi, 200)
    v = np.linspace(v0, v0 + 15, 300)[:, None]
    measured = np.max(np.exp(-mu * v) * np.abs(w(u, v)))
    bound = np.exp(-mu * v0) * np.sum(np.abs(phi.coefficients))
    assert measured <= bound * (1 + 1e-12)


def test_shifted_uses_basis():
    S = reduced_spectrum(0.2, 6)
    phi = FourierBoundary.mode(3, 6)
    w = extend_shifted(1.0, phi, basis=S)
    u = np.linspace(0, S.U_sigma, 9)
    assert np.allclose(w(u, 2.0), np.exp(-3.0) * S.evaluate(u, 3), atol=1e-12)


def _fd_laplacian_polar(w, r, t, h=1e-3):
    def f(rr, tt):
        return w(rr, tt)

    frr = (f(r + h, t) - 2 * f(r, t) + f(r - h, t)) / h**2
    fr = (f(r + h, t) - f(r - h, t)) / (2 * h)
    ftt = (f(r, t + h) - 2 * f(r, t) + f(r, t - h)) / h**2
    return frr + fr / r + ftt / r**2


@given(coef_lists)
@settings(max_examples=30, deadline=None)
def test_extensions_harmonic(c):
    phi = FourierBoundary("even", _perp(c))
    rng = np.random.default_rng(0)
    r = rng.uniform(1.2, 3.0, 100)
    t = rng.uniform(0, 2 * np.pi, 100)
    scale = 1 + np.sum(np.abs(phi.coefficients) * np.arange(phi.n + 1) ** 2)
    for w in (extend_exterior(1.0, phi), extend_interior(3.5, phi)):
        assert np.max(np.abs(_fd_laplacian_polar(w, r, t))) < 1e-4 * scale
    cyl = extend_halfcylinder(FourierBoundary("even", _perp(c, 2)))
    s = r - 1
    h = 1e-3
    lap = (cyl(s + h, t) - 2 * cyl(s, t) + cyl(s - h, t) + cyl(s, t + h) - 2 * cyl(s, t) + cyl(s, t - h)) / h**2
    assert np.max(np.abs(lap)) < 1e-4 * scale


@given(coef_lists, st.floats(0.5, 4.0))
@settings(max_examples=40, deadline=None)
def test_boundary_trace(c, rho):
    phi = FourierBoundary("even", _perp(c))
    for w in (extend_exterior(rho, phi), extend_interior(rho, phi)):
        assert np.allclose(w(rho, TH), phi(TH), atol=1e-13)
    odd = FourierBoundary("odd", _perp(c))
    assert np.allclose(extend_exterior(rho, odd)(rho, TH), odd(TH), atol=1e-13)


@pytest.mark.parametrize("i", [1, 2, 5])
def test_decay_rates(i):
    phi = FourierBoundary.mode(i, 6)
    w = extend_exterior(1.0, phi)
    slope = np.log(w(4.0, 0.0) / w(2.0, 0.0)) / np.log(2.0)
    assert slope == pytest.approx(-i, abs=1e-10)
    if i >= 2:
        c = extend_halfcylinder(phi)
        rate = np.log(c(3.0, 0.0) / c(1.0, 0.0)) / 2.0
        assert rate == pytest.approx(-i, abs=1e-10)


def test_derivative_identity_examples():
    rep = derivative_identity_exterior(FourierBoundary.mode(1, 4), 1.0)
    assert rep["max_violation"] < 1e-14
    rep = derivative_identity_exterior(FourierBoundary.mode(0, 4), 1.0)
    assert rep["max_violation"] == 0.0 and rep["scale"] == 0.0


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=9, max_size=9), st.floats(0.3, 5.0))
@settings(max_examples=40, deadline=None)
def test_derivative_identities_modewise(c, r0):
    phi = FourierBoundary("even", _perp(c))
    assert derivative_identity_exterior(phi, r0)["max_violation"] < 1e-10
    assert derivative_identity_interior(phi, r0)["max_violation"] < 1e-10


def test_literal_shift_fails_beyond_first_mode():
    # a single quarter-turn shift is only right on modes i = 1 mod 4
    assert derivative_identity_exterior(FourierBoundary.mode(5, 6), 1.3, literal=True)["max_violation"] < 1e-12
    assert derivative_identity_exterior(FourierBoundary.mode(2, 6), 1.3, literal=True)["max_violation"] > 1.0


def test_arithmetic_and_norms():
    a = FourierBoundary("even", [0.0, 1.0, 2.0])
    b = FourierBoundary("even", [0.0, 0.5])
    assert np.allclose((a + b).coefficients, [0, 1.5, 2.0])
    assert np.allclose((a - b).coefficients, [0, 0.5, 2.0])
    assert np.allclose((a * 2).coefficients, [0, 2, 4])
    assert a.sup_norm() == pytest.approx(3.0, rel=1e-6)
    with pytest.raises(OrthogonalityError):
        a + FourierBoundary("odd", [0.0, 1.0])
