"""Lattices of covolume pi/2 and the Weierstrass sigma machinery.

Everything here works with lattices normalized so that ``omega1 > 0``,
``Im(omega2) > 0`` and ``omega1 * Im(omega2) = pi/2``.  Under that
normalization the function ``exp(-|z|^2) |sigma_*(z)|`` is doubly periodic,
which is what the torus Green function is built on.

Evaluation goes through the Jacobi theta function ``theta_1`` on a
Lagrange-reduced basis, so the nome is always small and the series needs only
a handful of terms.  Arguments are first reduced to the centered fundamental
cell and the quasi-periodicity factor is carried analytically in log form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateLatticeError",
    "Lattice",
    "normalize_lattice",
    "square_lattice",
    "hexagonal_lattice",
    "half_period_zeta",
    "sigma",
    "log_sigma",
    "sigma_star",
    "sigma_star_polar",
    "log_sigma_star",
    "weyl_translate",
    "reduce_point",
    "lattice_sign",
    "log_abs_sigma_star_periodic",
    "COVOLUME",
]

COVOLUME = math.pi / 2
_SERIES_EPS = 1e-18


class DegenerateLatticeError(ValueError):
    """Raised when two generators do not span a lattice."""


def _lagrange_reduce(u: complex, v: complex) -> tuple[complex, complex]:
    # Gauss-Lagrange reduction; returns a basis with |e1| <= |e2| and
    # |Re(e2/e1)| <= 1/2, Im(e2/e1) > 0.
    for _ in range(200):
        if abs(v) < abs(u):
            u, v = v, u
        mu = round((v * u.conjugate()).real / abs(u) ** 2)
        if mu == 0:
            break
        v = v - mu * u
    if (v / u).imag < 0:
        v = -v
    return u, v


def _theta_coefficients(tau: complex) -> np.ndarray:
    """Coefficients c_n = 2 (-1)^n q^{(n+1/2)^2} of theta_1, q = exp(i pi tau)."""
    coeffs = []
    n = 0
    while True:
        c = 2.0 * (-1) ** n * cmath.exp(1j * math.pi * tau * (n + 0.5) ** 2)
        coeffs.append(c)
        # the derivative series weights terms by (2n+1)^3, stop well past it
        if abs(c) * (2 * n + 1) ** 3 < _SERIES_EPS * abs(coeffs[0]) and n >= 2:
            break
        n += 1
        if n > 400:
            raise ArithmeticError(f"theta series for tau={tau} does not converge")
    return np.array(coeffs)


def _lambda_from_theta(period: complex, tau: complex) -> complex:
    # lambda = 2 zeta(period/2) = -pi^2 theta1'''(0) / (3 period theta1'(0))
    c = _theta_coefficients(tau)
    k = 2 * np.arange(len(c)) + 1
    d1 = np.sum(c * k)
    d3 = -np.sum(c * k**3)
    return complex(-(math.pi**2) * d3 / (3.0 * period * d1))


@dataclass(frozen=True)
class Lattice:
    """A lattice ``omega1 Z + omega2 Z`` of covolume pi/2.

    ``frame`` is the complex factor taking the coordinates of the generators
    the user supplied to the normalized coordinates used here.
    """

    omega1: float
    omega2: complex
    lambda1: complex
    lambda2: complex
    b: complex
    theta_truncation: int
    frame: complex = 1.0
    e1: complex = field(default=0j, repr=False)
    e2: complex = field(default=0j, repr=False)
    lam_e1: complex = field(default=0j, repr=False)
    lam_e2: complex = field(default=0j, repr=False)
    theta_coeffs: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def generators(self) -> tuple[complex, complex]:
        return complex(self.omega1), self.omega2

    @property
    def reduced_basis(self) -> tuple[complex, complex]:
        return self.e1, self.e2

    @property
    def min_length(self) -> float:
        return abs(self.e1)

    def coordinates(self, z):
        """Real coordinates (s, t) with ``z = s*omega1 + t*omega2``."""
        z = np.asarray(z, dtype=complex)
        t = z.imag / self.omega2.imag
        s = (z.real - t * self.omega2.real) / self.omega1
        return s, t

    def point(self, s, t):
        return np.asarray(s) * self.omega1 + np.asarray(t) * self.omega2

    def eta(self, m, n):
        """Quasi-period ``zeta(z + m e1 + n e2) - zeta(z)`` in the reduced basis."""
        return np.asarray(m) * self.lam_e1 + np.asarray(n) * self.lam_e2

    def legendre_residual(self) -> float:
        return abs(self.lambda1 * self.omega2 - self.lambda2 * self.omega1 - 2j * math.pi)

    def b_residual(self) -> float:
        w1, w2 = self.omega1, self.omega2
        other = w2.conjugate() / w2 - self.lambda2 / (2 * w2)
        return abs((1 - self.lambda1 / (2 * w1)) - other)

    def covolume(self) -> float:
        return self.omega1 * self.omega2.imag

    def contains(self, z, tol: float = 1e-9) -> np.ndarray:
        s, t = self.coordinates(z)
        return (np.abs(s - np.round(s)) < tol) & (np.abs(t - np.round(t)) < tol)


def normalize_lattice(w1: complex, w2: complex) -> Lattice:
    """Rotate, orient and rescale two generators to a covolume-pi/2 lattice.

    The first generator is rotated onto the positive real axis, the second is
    negated if needed so that it lies in the upper half-plane, and both are
    scaled by a common positive factor so that ``omega1 * Im(omega2) = pi/2``.

    Raises
    ------
    DegenerateLatticeError
        If ``w1`` and ``w2`` are linearly dependent over the reals.
    """
    w1, w2 = complex(w1), complex(w2)
    if not (cmath.isfinite(w1) and cmath.isfinite(w2)) or w1 == 0 or w2 == 0:
        raise DegenerateLatticeError("generators must be finite and nonzero")
    ratio = w2 / w1
    if abs(ratio.imag) <= 1e-12 * abs(ratio):
        raise DegenerateLatticeError(f"generators {w1} and {w2} are collinear")
    rot = w1.conjugate() / abs(w1)
    v1, v2 = abs(w1), w2 * rot
    if v2.imag < 0:
        v2 = -v2
    scale = math.sqrt(COVOLUME / (v1 * v2.imag))
    omega1, omega2 = scale * v1, scale * v2
    # negating v2 leaves the point set unchanged, so the frame is just scale*rot
    return _build(omega1, omega2, scale * rot)


def _build(omega1: float, omega2: complex, frame: complex = 1.0) -> Lattice:
    e1, e2 = _lagrange_reduce(complex(omega1), complex(omega2))
    tau = e2 / e1
    lam_e1 = _lambda_from_theta(e1, tau)
    # the swapped basis (e2, -e1) has tau' = -1/tau in the upper half-plane
    lam_e2 = _lambda_from_theta(e2, -e1 / e2)
    coeffs = _theta_coefficients(tau)

    def lam(w: complex) -> complex:
        m, n = _integer_coords(e1, e2, w)
        return m * lam_e1 + n * lam_e2

    lambda1, lambda2 = lam(complex(omega1)), lam(complex(omega2))
    b = 1 - lambda1 / (2 * omega1)
    lat = Lattice(
        omega1=float(omega1),
        omega2=complex(omega2),
        lambda1=lambda1,
        lambda2=lambda2,
        b=b,
        theta_truncation=len(coeffs),
        frame=complex(frame),
        e1=e1,
        e2=e2,
        lam_e1=lam_e1,
        lam_e2=lam_e2,
        theta_coeffs=coeffs,
    )
    res = lat.legendre_residual()
    if res > 1e-8 * max(1.0, abs(lambda1) * abs(omega2)):
        raise ArithmeticError(f"Legendre relation violated by {res:.3e}")
    return lat


def _integer_coords(e1: complex, e2: complex, w: complex) -> tuple[int, int]:
    det = (e1.conjugate() * e2).imag
    s = (w.conjugate() * e2).imag / det
    t = (e1.conjugate() * w).imag / det
    m, n = round(s), round(t)
    if abs(s - m) > 1e-6 or abs(t - n) > 1e-6:
        raise ValueError(f"{w} is not a lattice vector")
    return m, n


def square_lattice() -> Lattice:
    return normalize_lattice(1.0, 1j)


def hexagonal_lattice() -> Lattice:
    return normalize_lattice(1.0, cmath.exp(1j * math.pi / 3))


def half_period_zeta(L: Lattice) -> tuple[complex, complex]:
    """Return ``(lambda1, lambda2) = (2 zeta(omega1/2), 2 zeta(omega2/2))``."""
    return L.lambda1, L.lambda2


def lattice_sign(m, n):
    """Sign ``epsilon(w)`` in ``sigma(z + w) = epsilon sigma(z) exp(eta (z + w/2))``.

    It is -1 unless ``w/2`` is itself a lattice vector, i.e. unless both
    integer coordinates are even.  The value does not depend on the basis.
    """
    m, n = np.asarray(m), np.asarray(n)
    return np.where((m % 2 == 0) & (n % 2 == 0), 1.0, -1.0)


def reduce_point(L: Lattice, z):
    """Split ``z = z0 + m e1 + n e2`` with ``z0`` in the centered reduced cell."""
    z = np.asarray(z, dtype=complex)
    e1, e2 = L.e1, L.e2
    det = (e1.conjugate() * e2).imag
    s = (z.conjugate() * e2).imag / det
    t = (e1.conjugate() * z).imag / det
    m, n = np.round(s), np.round(t)
    z0 = z - m * e1 - n * e2
    return z0, m.astype(np.int64), n.astype(np.int64)


def _log_sigma_reduced(L: Lattice, z0: np.ndarray) -> np.ndarray:
    # log sigma(z0) for z0 in the centered reduced cell
    e1 = L.e1
    v = (math.pi / e1) * z0
    c = L.theta_coeffs
    theta = np.zeros_like(v)
    for n in range(len(c) - 1, -1, -1):
        theta = theta + c[n] * np.sin((2 * n + 1) * v)
    dtheta0 = np.sum(c * (2 * np.arange(len(c)) + 1))
    with np.errstate(divide="ignore"):
        return (
            np.log(e1 / math.pi)
            + L.lam_e1 * z0**2 / (2 * e1)
            + np.log(theta)
            - np.log(dtheta0)
        )


def log_sigma(L: Lattice, z):
    """Complex logarithm of the Weierstrass sigma function (branch arbitrary)."""
    z = np.asarray(z, dtype=complex)
    z0, m, n = reduce_point(L, z)
    w = m * L.e1 + n * L.e2
    eps = lattice_sign(m, n)
    out = _log_sigma_reduced(L, z0) + L.eta(m, n) * (z0 + w / 2)
    out = out + np.where(eps < 0, 1j * math.pi, 0.0)
    return out if out.ndim else complex(out)


def sigma(L: Lattice, z):
    """Weierstrass sigma function of the lattice ``L``.

    Entire, odd, with simple zeros exactly on the lattice and
    ``sigma(z)/z -> 1`` at the origin.
    """
    out = np.exp(log_sigma(L, z))
    return out if np.ndim(out) else complex(out)


def log_sigma_star(L: Lattice, z):
    """Complex log of ``sigma_*(z) = exp(b z^2) sigma(z)``, overflow safe.

    The real part ``log|sigma_*(z)|`` is exact to rounding for any ``z``; the
    imaginary part is a valid argument (not reduced modulo 2 pi).
    """
    z = np.asarray(z, dtype=complex)
    z0, m, n = reduce_point(L, z)
    w = m * L.e1 + n * L.e2
    eps = lattice_sign(m, n)
    out = L.b * z0**2 + _log_sigma_reduced(L, z0)
    out = out + 2 * np.conj(w) * z0 + np.abs(w) ** 2
    out = out + np.where(eps < 0, 1j * math.pi, 0.0)
    return out if out.ndim else complex(out)


def log_abs_sigma_star_periodic(L: Lattice, z):
    """``log|sigma_*(z)| - |z|^2``, which is Lambda-periodic."""
    z = np.asarray(z, dtype=complex)
    z0, _, _ = reduce_point(L, z)
    out = (L.b * z0**2 + _log_sigma_reduced(L, z0)).real - np.abs(z0) ** 2
    return out if out.ndim else float(out)


def sigma_star_polar(L: Lattice, z):
    """``(log|sigma_*(z)| - |z|^2, arg sigma_*(z))`` without forming large exponents.

    The first component is Lambda-periodic; the argument is not reduced
    modulo 2 pi.
    """
    z = np.asarray(z, dtype=complex)
    z0, m, n = reduce_point(L, z)
    w = m * L.e1 + n * L.e2
    base = L.b * z0**2 + _log_sigma_reduced(L, z0)
    logmag = base.real - np.abs(z0) ** 2
    phase = base.imag + 2 * (np.conj(w) * z0).imag + np.where(lattice_sign(m, n) < 0, math.pi, 0.0)
    return logmag, phase


def sigma_star(L: Lattice, z):
    """Modified sigma function ``exp(b z^2) sigma(z)`` with ``b = 1 - lambda1/(2 omega1)``."""
    out = np.exp(log_sigma_star(L, z))
    return out if np.ndim(out) else complex(out)


def weyl_translate(alpha: complex, f, z):
    """Weyl translate ``T_alpha f(z) = exp(-2 conj(alpha) z - |alpha|^2) f(z + alpha)``."""
    z = np.asarray(z, dtype=complex)
    alpha = complex(alpha)
    out = np.exp(-2 * alpha.conjugate() * z - abs(alpha) ** 2) * f(z + alpha)
    return out if np.ndim(out) else complex(out)
