import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import ellipk, lqmn

from kmrglue.errors import DomainError
from kmrglue.specfun import agm, complete_K, incomplete_F, legendre_P1, legendre_Q1, legendre_Q1_derivatives

# quadrature of 1/sqrt(1 - m sin^2 t), frozen
K_QUAD = {0.0: 1.5707963267948966, 0.25: 1.6857503548125963, 0.5: 1.8540746773013719, 0.9: 2.578092113348173}
F_QUAD = {(2.0, 0.3): 2.220590552128474, (7.0, 0.3): 7.59007171719006, (-1.0, 0.3): -1.0457364440164778, (1.0, -2.0): 0.8295608857883412}
# scipy.special.lqmn, frozen
Q_REF = {(0, 0.3): -0.9071441187390664, (1, 0.3): -0.6097483350729811, (2, 0.3): 2.197802197802198, (3, -0.6): 9.374999999999998}


@pytest.mark.parametrize("m,ref", sorted(K_QUAD.items()))
def test_complete_K_matches_quadrature(m, ref):
    assert complete_K(m) == pytest.approx(ref, rel=1e-14)


def test_complete_K_limit_and_domain():
    assert complete_K(0.0) == pytest.approx(np.pi / 2, rel=1e-15)
    with pytest.raises(DomainError):
        complete_K(1.0)
    with pytest.raises(DomainError):
        complete_K(-0.1)


def test_agm_closed_case():
    assert agm(1.0, 1.0) == 1.0
    assert agm(1.0, 0.5) == pytest.approx(0.7283955155234534, rel=1e-14)


@pytest.mark.parametrize("key,ref", sorted(F_QUAD.items()))
def test_incomplete_F_matches_quadrature(key, ref):
    y, m = key
    assert incomplete_F(y, m) == pytest.approx(ref, rel=1e-13)


@given(st.floats(0.0, 0.95), st.floats(-10, 10))
@settings(max_examples=60, deadline=None)
def test_incomplete_F_quasi_periodicity(m, y):
    # F(y + pi) = F(y) + 2 K
    lhs = incomplete_F(y + np.pi, m)
    assert lhs == pytest.approx(incomplete_F(y, m) + 2 * ellipk(m), rel=1e-12, abs=1e-12)


@given(st.floats(0.0, 0.95), st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_incomplete_F_odd(m, y):
    assert incomplete_F(-y, m) == pytest.approx(-incomplete_F(y, m), abs=1e-13)


@pytest.mark.parametrize("key,ref", sorted(Q_REF.items()))
def test_legendre_Q1_reference(key, ref):
    j, t = key
    assert legendre_Q1(j, t) == pytest.approx(ref, rel=1e-13)


@given(st.integers(0, 6), st.floats(-0.98, 0.98))
@settings(max_examples=80, deadline=None)
def test_legendre_Q1_matches_scipy(j, t):
    q, _ = lqmn(j, 1, t)
    assert legendre_Q1(j, t) == pytest.approx(q[j, 1], rel=1e-10, abs=1e-12)


def _ode_residual(j, t):
    Q, dQ, d2Q = legendre_Q1_derivatives(j, t)
    return (1 - t * t) * ((1 - t * t) * d2Q - 2 * t * dQ) - j * j * Q + 2 * (1 - t * t) * Q, Q


@pytest.mark.parametrize("j", range(4))
def test_legendre_Q1_solves_ode(j):
    res, _ = _ode_residual(j, np.linspace(-0.97, 0.97, 301))
    assert np.max(np.abs(res)) < 1e-8


@pytest.mark.parametrize("j", range(4, 9))
def test_legendre_Q1_high_order_relative_residual(j):
    # Q grows like (1 - t^2)^{-j/2}; the absolute residual carries that scale
    res, Q = _ode_residual(j, np.linspace(-0.97, 0.97, 301))
    assert np.max(np.abs(res)) / np.max(np.abs(Q)) < 1e-12


def test_legendre_Q1_derivatives_match_differences():
    t = np.linspace(-0.8, 0.8, 17)
    h = 1e-5
    for j in range(4):
        Q, dQ, d2Q = legendre_Q1_derivatives(j, t)
        fd1 = (legendre_Q1(j, t + h) - legendre_Q1(j, t - h)) / (2 * h)
        fd2 = (legendre_Q1(j, t + h) - 2 * Q + legendre_Q1(j, t - h)) / h**2
        assert np.allclose(dQ, fd1, rtol=1e-7, atol=1e-7)
        assert np.allclose(d2Q, fd2, rtol=1e-4, atol=1e-4)


def test_legendre_P1_values():
    t = 0.3
    assert legendre_P1(0, t) == pytest.approx(t)
    assert abs(legendre_P1(1, t)) == pytest.approx(np.sqrt(1 - t * t))
    assert legendre_P1(2, t) == 0.0


def test_legendre_Q1_endpoint_rejected():
    with pytest.raises(DomainError):
        legendre_Q1(1, 1.0)
