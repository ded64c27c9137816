import numpy as np
import pytest

from kmrglue.errors import DomainError, OrthogonalityError, ScaleError
from kmrglue.harmonic import FourierBoundary as FB
from kmrglue.kmr import SurfaceParams
from kmrglue.model_graphs import (
    EndModel,
    chm_end_graph,
    flat_annulus,
    flux,
    kmr_boundary_graph,
    mean_curvature_residual,
    scherk_period,
    scherk_solve,
    seam_radius,
)

EPS = 1e-2
R = np.array([5.0, 8.0, 30.0])
TH = np.array([0.0, 0.7, 2.1])


def _even(i, amp, flags=("perp1",)):
    return FB.mode(i, n=4, amplitude=amp, flags=flags)


def test_seam_radius():
    assert seam_radius(0.01) == pytest.approx(5.0)
    with pytest.raises(ScaleError):
        seam_radius(1.5)


def test_chm_middle_zero():
    m = chm_end_graph("middle", EPS, FB.zeros(4, flags=("perp1",)))
    assert np.all(m(R, TH) == 0)
    assert m.logCoeff == 0


def test_chm_top_bottom():
    psi = FB.zeros(4, flags=("perp_e01",))
    top = chm_end_graph("top", EPS, psi, sigma_end=0.3, tilt=0.0)
    assert np.allclose(top(R, TH), 0.3 - np.log(2 * R), atol=1e-15)
    assert top.logCoeff == -1
    bot = chm_end_graph("bottom", EPS, psi, sigma_end=0.3, tilt=0.0)
    assert np.allclose(bot(R, TH), -0.3 + np.log(2 * R), atol=1e-15)
    assert bot.logCoeff == 1
    tilted = chm_end_graph("top", EPS, psi)
    assert np.allclose(tilted(R, TH) - (-np.log(2 * R)), -EPS / 2 * R * np.cos(TH), atol=1e-14)


def test_chm_matches_catenoid_asymptotically():
    # lower half of the unit-neck catenoid is -arccosh(r); the log model misses it by 1/(4 r^2)
    psi = FB.zeros(4, flags=("perp_e01",))
    top = chm_end_graph("top", EPS, psi, tilt=0.0)
    r = np.geomspace(5, 200, 6)
    gap = top(r, 0.0) - (-np.arccosh(r))
    assert np.all(np.abs(gap * 4 * r**2 + 1.0) < 0.5 / r**2)
    r_eps = seam_radius(EPS)
    assert top(r_eps, 0.0) + np.arccosh(r_eps) == pytest.approx(-EPS, rel=0.02)


def test_chm_orthogonality():
    with pytest.raises(OrthogonalityError):
        chm_end_graph("top", EPS, _even(1, 1e-3, flags=()))
    with pytest.raises(OrthogonalityError):
        chm_end_graph("top", EPS, FB.mode(2, n=4, parity="odd"))
    with pytest.raises(DomainError):
        chm_end_graph("side", EPS, FB.zeros(4))
    with pytest.raises(ScaleError):
        chm_end_graph("top", EPS, _even(2, 1.0, ("perp_e01",)), kappa=1.0)


def test_chm_dressing_carries_data():
    psi = _even(3, 2e-3, ("perp_e01",))
    top = chm_end_graph("top", EPS, psi, tilt=0.0)
    r_eps = seam_radius(EPS)
    th = np.linspace(0, 2 * np.pi, 9)
    assert np.allclose(top(r_eps, th) + np.log(2 * r_eps), 2e-3 * np.cos(3 * th), atol=1e-15)
    inner = top(r_eps / 2, th) + np.log(r_eps)
    assert np.allclose(inner, 2e-3 / 8 * np.cos(3 * th), atol=1e-15)


def test_reflection():
    top = chm_end_graph("top", EPS, FB.zeros(4, flags=("perp_e01",)), sigma_end=0.2)
    ref = top.reflect()
    assert ref.logCoeff == 1
    assert np.allclose(ref(R, TH), -top(R, TH))
    assert ref.reflect() == top
    with pytest.raises(DomainError):
        EndModel("cone", None)


def test_flat_annulus():
    phi = _even(2, 1e-3)
    m = flat_annulus(EPS, phi, offset=0.5)
    r = seam_radius(EPS)
    assert np.allclose(m(r, TH), 0.5 + 1e-3 * np.cos(2 * TH), atol=1e-15)
    assert np.allclose(m(2 * r, TH), 0.5 + 1e-3 / 4 * np.cos(2 * TH), atol=1e-15)


def test_kmr_boundary_graph():
    p = SurfaceParams(EPS / 2, EPS / 4, 0.0)
    phi = FB.zeros(4, flags=("perp_e01",))
    m = kmr_boundary_graph("beta0", p, 0.0, (0.0, 0.0), 0.1, phi, EPS)
    k1, k2 = m.expansion.tilt
    assert k1 == pytest.approx(2 * np.sin(EPS / 8))
    assert k2 == 0
    assert m.logCoeff == -1
    shifted = kmr_boundary_graph("beta0", p, 0.0, (0.0, 0.0), 0.1, phi, EPS, kappa_shift=1e-3)
    assert shifted.expansion.tilt[0] == pytest.approx(k1 + 1e-3)
    assert np.allclose(m(R, 0.5 * np.pi), 0.1 - np.log(2 * R), atol=1e-14)
    with pytest.raises(ScaleError):
        kmr_boundary_graph("beta0", p, 0.8 * EPS, (0.5 * EPS, 0.0), 0.0, phi, EPS)
    with pytest.raises(OrthogonalityError):
        kmr_boundary_graph("beta0", p, 0.0, (0, 0), 0.0, FB.zeros(4, parity="odd", flags=("perpsin",)), EPS)
    with pytest.raises(DomainError):
        kmr_boundary_graph("alpha0", p, 0.0, (0, 0), 0.0, FB.zeros(4, parity="odd", flags=("perpsin",)), EPS)
    with pytest.raises(DomainError):
        kmr_boundary_graph("gamma", p, 0.0, (0, 0), 0.0, phi, EPS)


def test_kmr_alpha_family():
    p = SurfaceParams(EPS / 2, 0.0, EPS / 4)
    phi = FB.mode(2, n=4, parity="odd", amplitude=1e-3, flags=("perpsin",))
    m = kmr_boundary_graph("alpha0", p, 0.0, (0.0, 0.0), 0.0, phi, EPS)
    assert m.parity == "odd"
    assert m.expansion.tilt[0] == 0.0


def test_scherk_period():
    assert scherk_period(np.pi / 2, np.pi / 2) == pytest.approx(np.pi)
    with pytest.raises(DomainError):
        scherk_period(0.0, 0.0)


@pytest.fixture(scope="module")
def scherk():
    th = 0.4 * EPS
    L = scherk_period(th, th)
    phi = _even(2, 2e-3)
    up = scherk_solve((th, th), L, EPS, phi, offset=0.1)
    down = scherk_solve((th, th), L, EPS, phi * -1.0, offset=-0.1, orientation="down")
    return up, down, phi


def test_scherk_flux(scherk):
    up, down, _ = scherk
    for r in (6.0, 20.0):
        assert flux(up, r) == pytest.approx(-2 * np.pi, rel=1e-4)
        assert flux(down, r) == pytest.approx(2 * np.pi, rel=1e-4)
    assert up.logCoeff == pytest.approx(-up.info["ell"])


def test_scherk_boundary_trace(scherk):
    up, _, phi = scherk
    s = seam_radius(EPS)
    th = np.linspace(0, 2 * np.pi, 17)
    trace = up(s, th) + up.info["ell"] * np.log(2 * s)
    assert np.max(np.abs(trace - 0.1 - phi(th))) < 5e-4
    th = (np.arange(256) + 0.5) * 2 * np.pi / 256
    assert np.mean(up(s, th) + up.info["ell"] * np.log(2 * s)) == pytest.approx(0.1, abs=1e-12)


def test_scherk_symmetry_and_reflection(scherk):
    up, down, _ = scherk
    assert np.allclose(up(R, TH), up(R, -TH), atol=1e-12)
    assert np.allclose(down(R, TH), -up(R, TH), atol=1e-12)
    assert down.logCoeff == pytest.approx(-up.logCoeff)


def test_scherk_contraction(scherk):
    up, _, _ = scherk
    assert up.info["contraction"] < 0.9
    steps = [s for _, s in up.info["trace"]]
    assert steps[-1] < 1e-10


def test_scherk_trivial_and_cubic():
    zero = scherk_solve((0, 0), 40.0, EPS, FB.zeros(4, flags=("perp1",)))
    assert np.all(zero(R, TH) == 0)
    norms = [
        scherk_solve((0, 0), 40.0, EPS, _even(2, a)).info["correction_norm"] for a in (1e-2, 2e-2)
    ]
    assert norms[1] / norms[0] == pytest.approx(8.0, rel=0.05)


def test_scherk_validation():
    phi = _even(2, 1e-3)
    with pytest.raises(DomainError):
        scherk_solve((0.5, 0.5), 40.0, EPS, phi)
    with pytest.raises(ScaleError):
        scherk_solve((0, 0), 10.0, EPS, phi)
    with pytest.raises(DomainError):
        scherk_solve((0.004, 0.004), 1000.0, EPS, phi)
    with pytest.raises(OrthogonalityError):
        scherk_solve((0, 0), 40.0, EPS, FB.mode(2, n=4, parity="odd"))
    with pytest.raises(DomainError):
        scherk_solve((0, 0), 40.0, EPS, phi, orientation="sideways")


def test_residual_zero_fields():
    zero = lambda a, b: 0 * a * b
    for eq in ("planar_end", "catenoid_normal", "scherk_graph"):
        rows = mean_curvature_residual(zero, eq, (1.0, 2.0, 0.0, 1.0), 0.1, levels=2)
        assert all(row["max_residual"] < 1e-12 for row in rows)
    with pytest.raises(DomainError):
        mean_curvature_residual(zero, "willmore", (1.0, 2.0, 0.0, 1.0), 0.1)


def test_scherk_residual_order(scherk):
    up, _, _ = scherk
    rows = mean_curvature_residual(up, "scherk_graph", (6.0, 10.0, -2.0, 2.0), 0.2)
    assert rows[0]["max_residual"] < 1e-4
    assert rows[-1]["order_estimate"] == pytest.approx(2.0, abs=0.3)
