"""Explicit harmonic extension operators and their derivative identities.

Boundary data are finite trigonometric series of fixed parity. Even data use
``cos(i theta)``, odd data use ``sin(i theta)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OrthogonalityError

__all__ = [
    "DEFAULT_TRUNCATION",
    "FourierBoundary",
    "HarmonicField",
    "extend_exterior",
    "extend_interior",
    "extend_halfcylinder",
    "extend_shifted",
    "derivative_identity_exterior",
    "derivative_identity_interior",
]

DEFAULT_TRUNCATION = 32

FLAGS = ("perp1", "perpcos", "perpsin", "perp_e01")


@dataclass(frozen=True)
class FourierBoundary:
    """Parity-constrained trigonometric boundary data.

    Parameters
    ----------
    parity : {"even", "odd"}
        Basis family, ``cos(i theta)`` or ``sin(i theta)``.
    coefficients : array_like
        Coefficients ``c_0 .. c_N``. For odd parity ``c_0`` must be zero.
    flags : iterable of str
        Declared orthogonality: ``perp1``, ``perpcos``, ``perpsin``,
        ``perp_e01`` (orthogonal to the first two basis functions).
    """

    parity: str
    coefficients: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise DomainError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        c = np.array(self.coefficients, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        flags = frozenset(self.flags)
        unknown = flags - set(FLAGS)
        if unknown:
            raise DomainError(f"unknown orthogonality flags {sorted(unknown)}")
        object.__setattr__(self, "flags", flags)
        if self.parity == "odd" and c[0] != 0.0:
            raise OrthogonalityError("odd data cannot carry a constant term")
        for idx in self._forced_zero(flags):
            if idx < c.size and c[idx] != 0.0:
                raise OrthogonalityError(
                    f"flag set {sorted(flags)} forbids mode {idx} but c_{idx}={c[idx]!r}"
                )

    def _forced_zero(self, flags):
        zero = set()
        if "perp1" in flags or "perp_e01" in flags:
            zero.add(0)
        if "perp_e01" in flags:
            zero.add(1)
        if self.parity == "even" and "perpcos" in flags:
            zero.add(1)
        if self.parity == "odd" and "perpsin" in flags:
            zero.add(1)
        return zero

    # construction helpers
    @classmethod
    def zeros(cls, n=DEFAULT_TRUNCATION, parity="even", flags=()):
        return cls(parity, np.zeros(n + 1), frozenset(flags))

    @classmethod
    def mode(cls, i, n=DEFAULT_TRUNCATION, parity="even", amplitude=1.0, flags=()):
        c = np.zeros(max(n, i) + 1)
        c[i] = amplitude
        return cls(parity, c, frozenset(flags))

    @classmethod
    def from_samples(cls, theta, values, n=DEFAULT_TRUNCATION, parity="even", flags=()):
        """Least-squares projection of samples onto the first ``n`` modes."""
        theta = np.asarray(theta, dtype=float)
        basis = cls._basis(np.arange(n + 1), theta, parity)
        if parity == "odd":
            basis = basis[:, 1:]
        coef, *_ = np.linalg.lstsq(basis, np.asarray(values, dtype=float), rcond=None)
        if parity == "odd":
            coef = np.concatenate([[0.0], coef])
        c = cls._apply_flags(coef, parity, flags)
        return cls(parity, c, frozenset(flags))

    @staticmethod
    def _apply_flags(coef, parity, flags):
        c = np.array(coef, dtype=float)
        probe = FourierBoundary(parity, np.zeros(1))
        for idx in probe._forced_zero(frozenset(flags)):
            if idx < c.size:
                c[idx] = 0.0
        return c

    @staticmethod
    def _basis(i, theta, parity):
        arg = np.multiply.outer(theta, i)
        return np.cos(arg) if parity == "even" else np.sin(arg)

    # accessors
    @property
    def n(self):
        return self.coefficients.size - 1

    @property
    def modes(self):
        return np.arange(self.coefficients.size)

    def coefficient(self, i):
        return float(self.coefficients[i]) if i < self.coefficients.size else 0.0

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self._basis(self.modes, theta, self.parity) @ self.coefficients

    def d_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        i = self.modes
        arg = np.multiply.outer(theta, i)
        if self.parity == "even":
            return -np.sin(arg) @ (i * self.coefficients)
        return np.cos(arg) @ (i * self.coefficients)

    def sup_norm(self, samples=512):
        theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        return float(np.max(np.abs(self(theta)))) if self.coefficients.any() else 0.0

    def l2_norm(self):
        c = self.coefficients
        return float(np.sqrt(2 * np.pi * c[0] ** 2 + np.pi * np.sum(c[1:] ** 2)))

    def resized(self, n):
        c = np.zeros(n + 1)
        k = min(n, self.n) + 1
        c[:k] = self.coefficients[:k]
        return FourierBoundary(self.parity, c, self.flags)

    def with_flags(self, flags):
        c = self._apply_flags(self.coefficients, self.parity, flags)
        return FourierBoundary(self.parity, c, frozenset(flags))

    def _combine(self, other, sign):
        if not isinstance(other, FourierBoundary):
            return NotImplemented
        if other.parity != self.parity:
            raise OrthogonalityError("cannot combine boundary data of different parity")
        n = max(self.n, other.n)
        a = self.resized(n).coefficients
        b = other.resized(n).coefficients
        return FourierBoundary(self.parity, a + sign * b, self.flags & other.flags)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        return FourierBoundary(self.parity, self.coefficients * float(scalar), self.flags)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def _require(phi, flags, who):
    bad = []
    for i in phi._forced_zero(frozenset(flags)):
        if abs(phi.coefficient(i)) > 0.0:
            bad.append(i)
    if bad:
        raise OrthogonalityError(f"{who}: boundary data has forbidden modes {bad}")


@dataclass(frozen=True)
class HarmonicField:
    """Mode-wise field ``sum_i R_i(r) c_i b_i(theta)``.

    ``profile(i, r)`` returns the radial factor and ``dprofile(i, r)`` its
    derivative. ``b_i`` is ``cos`` or ``sin`` by parity.
    """

    phi: FourierBoundary
    profile: object
    dprofile: object
    first_mode: int = 0

    def _active(self):
        i = self.phi.modes
        mask = i >= self.first_mode
        return i[mask], self.phi.coefficients[mask]

    def _angular(self, theta, i, deriv=False):
        arg = np.multiply.outer(np.asarray(theta, dtype=float), i)
        if self.phi.parity == "even":
            return -i * np.sin(arg) if deriv else np.cos(arg)
        return i * np.cos(arg) if deriv else np.sin(arg)

    def __call__(self, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        i, c = self._active()
        radial = self.profile(i, r[..., None])
        return np.sum(radial * c * self._angular(theta, i), axis=-1)

    def d_r(self, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        i, c = self._active()
        radial = self.dprofile(i, r[..., None])
        return np.sum(radial * c * self._angular(theta, i), axis=-1)

    def d_theta(self, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        i, c = self._active()
        radial = self.profile(i, r[..., None])
        return np.sum(radial * c * self._angular(theta, i, deriv=True), axis=-1)


def extend_exterior(rho_bar, phi):
    """Harmonic extension to ``rho >= rho_bar`` decaying at infinity.

    ``w(rho, theta) = sum_{i>=1} (rho_bar / rho)^i c_i cos(i theta)``.
    """
    if rho_bar <= 0:
        raise DomainError("rho_bar must be positive")
    _require(phi, {"perp1"}, "extend_exterior")
    return HarmonicField(
        phi,
        lambda i, r: (rho_bar / r) ** i,
        lambda i, r: -i * (rho_bar / r) ** i / r,
        first_mode=1,
    )


def extend_interior(rho_bar, phi):
    """Harmonic extension to ``rho <= rho_bar``, ``sum (rho / rho_bar)^i c_i cos(i theta)``."""
    if rho_bar <= 0:
        raise DomainError("rho_bar must be positive")
    _require(phi, {"perp1"}, "extend_interior")
    return HarmonicField(
        phi,
        lambda i, r: (r / rho_bar) ** i,
        lambda i, r: i * (r / rho_bar) ** i / r,
        first_mode=1,
    )


def extend_halfcylinder(phi):
    """Decaying harmonic extension to ``[0, inf) x S^1``: ``sum_{i>=2} e^{-i s} c_i cos(i theta)``.

    The returned field takes ``s`` in place of the radial argument.
    """
    _require(phi, {"perp1", "perpcos" if phi.parity == "even" else "perpsin"}, "extend_halfcylinder")
    return HarmonicField(
        phi,
        lambda i, s: np.exp(-i * s),
        lambda i, s: -i * np.exp(-i * s),
        first_mode=2,
    )


@dataclass(frozen=True)
class ShiftedField:
    """``w(u, v) = sum_{i>=2} e^{-i (v - v0)} c_i e_i(u)`` on ``[v0, inf)``."""

    v0: float
    phi: FourierBoundary
    basis: object

    def _eig(self, u, i):
        if self.basis is None:
            arg = np.multiply.outer(np.asarray(u, dtype=float), i)
            return np.cos(arg) if self.phi.parity == "even" else np.sin(arg)
        return self.basis.evaluate(u, i)

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        i = self.phi.modes[2:]
        c = self.phi.coefficients[2:]
        decay = np.exp(-np.multiply.outer(v - self.v0, i))
        return np.sum(decay * c * self._eig(u, i), axis=-1)

    def d_v(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        i = self.phi.modes[2:]
        c = self.phi.coefficients[2:]
        decay = -i * np.exp(-np.multiply.outer(v - self.v0, i))
        return np.sum(decay * c * self._eig(u, i), axis=-1)


def extend_shifted(v0, phi, basis=None):
    """Decaying extension on ``[v0, inf)`` in the Lame eigenbasis.

    Parameters
    ----------
    v0 : float
        Boundary ordinate.
    phi : FourierBoundary
        Coefficients in the chosen basis; must vanish on the first two modes.
    basis : SpectralSystem, optional
        Eigenbasis ``e_{sigma,i}``. ``None`` selects the ``sigma = 0`` basis
        ``cos(i u)``.
    """
    _require(phi, {"perp_e01"}, "extend_shifted")
    return ShiftedField(float(v0), phi, basis)


def _identity_report(phi, r0, sign, exterior, literal):
    theta = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    field_ = extend_exterior(r0, phi) if exterior else extend_interior(r0, phi)
    rhs = sign * r0 * field_.d_r(r0, theta)
    if literal:
        lhs = field_.d_theta(r0, theta - np.pi / 2)
    else:
        # each mode i shifted by its own quarter period pi / (2 i)
        lhs = np.zeros_like(theta)
        for i in phi.modes[1:]:
            single = FourierBoundary.mode(int(i), phi.n, phi.parity, phi.coefficient(int(i)))
            f_i = extend_exterior(r0, single) if exterior else extend_interior(r0, single)
            lhs = lhs + f_i.d_theta(r0, theta - np.pi / (2 * i))
    return {"max_violation": float(np.max(np.abs(lhs - rhs))), "scale": float(np.max(np.abs(rhs), initial=0.0))}


def derivative_identity_exterior(phi, r0, literal=False):
    """Check ``d_theta u(r0, theta - shift) = -r0 d_r u(r0, theta)`` for the exterior extension.

    With ``literal=False`` the shift is ``pi / (2 i)`` on mode ``i``; with
    ``literal=True`` a single shift ``pi / 2`` is applied to every mode, which
    agrees with the mode-wise form only on modes ``i = 1 (mod 4)``.

    Returns
    -------
    dict
        ``max_violation`` over a 256-point theta grid and the ``scale`` of the
        right-hand side.
    """
    if phi.coefficient(0) != 0.0:
        phi = FourierBoundary(phi.parity, np.concatenate([[0.0], phi.coefficients[1:]]), phi.flags)
    return _identity_report(phi, r0, -1.0, True, literal)


def derivative_identity_interior(phi, r0, literal=False):
    """Interior counterpart: ``d_theta u(r0, theta - shift) = +r0 d_r u(r0, theta)``."""
    if phi.coefficient(0) != 0.0:
        phi = FourierBoundary(phi.parity, np.concatenate([[0.0], phi.coefficients[1:]]), phi.flags)
    return _identity_report(phi, r0, 1.0, False, literal)
