"""Weyl (Bombieri) norms of univariate polynomials and related quantities.

Coefficient vectors are in ascending order: ``coeffs[j]`` multiplies ``z^j``.
The ambient degree N of a :class:`WeylPolynomial` may exceed its exact degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .sphere import SphereGrid, is_inf, sphere_distance

__all__ = [
    "WeylPolynomial",
    "UnsupportedRootError",
    "NotARootError",
    "ResolutionError",
    "binomial",
    "weyl_norm_sq",
    "weyl_norm_sq_integral",
    "poly_from_roots",
    "normalized_root_product",
    "BombieriResult",
    "bombieri_bounds",
    "condition_number",
    "log_energy",
    "log_energy_plane",
    "theta2_condition_form",
]


class UnsupportedRootError(ValueError):
    """A root at infinity where only finite roots make sense."""


class NotARootError(ValueError):
    """The point passed to :func:`condition_number` is not a root."""


class ResolutionError(ValueError):
    """The quadrature grid is too coarse for the requested degree."""


@dataclass(frozen=True)
class WeylPolynomial:
    coeffs: np.ndarray
    degree: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) != self.degree + 1:
            raise ValueError(f"degree {self.degree} needs {self.degree + 1} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs, degree: int | None = None) -> "WeylPolynomial":
        c = np.asarray(coeffs, dtype=complex)
        if degree is not None and degree + 1 > len(c):
            c = np.concatenate([c, np.zeros(degree + 1 - len(c), dtype=complex)])
        return cls(c, len(c) - 1)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def derivative(self, z):
        return np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(self.coeffs))

    def __mul__(self, other: "WeylPolynomial") -> "WeylPolynomial":
        return WeylPolynomial(np.convolve(self.coeffs, other.coeffs), self.degree + other.degree)


def binomial(N: int, j) -> np.ndarray:
    """Binomial coefficients; exact integers for N <= 50, log-gamma beyond."""
    j = np.asarray(j)
    if N <= 50:
        return np.array([math.comb(N, int(k)) for k in j.ravel()], dtype=float).reshape(j.shape)
    return np.exp(gammaln(N + 1) - gammaln(j + 1) - gammaln(N - j + 1))


def weyl_norm_sq(Q: WeylPolynomial) -> float:
    """``sum_j |a_j|^2 / C(N, j)``."""
    j = np.arange(Q.degree + 1)
    return float(np.sum(np.abs(Q.coeffs) ** 2 / binomial(Q.degree, j)))


def _weight_abs2(Q: WeylPolynomial, z):
    # |Q(z)|^2 / (1+|z|^2)^N, using the reversed polynomial in 1/z for |z| > 1
    z = np.asarray(z, dtype=complex)
    N = Q.degree
    inf = ~np.isfinite(z)
    zf = np.where(inf, 0.0, z)
    big = np.abs(zf) > 1
    out = np.empty(z.shape)
    zs = zf[~big]
    out[~big] = np.abs(Q(zs)) ** 2 / (1 + np.abs(zs) ** 2) ** N
    w = 1 / zf[big]
    rev = np.polynomial.polynomial.polyval(w, Q.coeffs[::-1])
    out[big] = np.abs(rev) ** 2 / (1 + np.abs(w) ** 2) ** N
    out[inf] = abs(Q.coeffs[-1]) ** 2
    return out


def weyl_norm_sq_integral(Q: WeylPolynomial, grid: SphereGrid) -> float:
    """``(N+1)/pi * int |Q|^2 / (1+|z|^2)^N dA_S`` by quadrature on ``grid``.

    Raises :class:`ResolutionError` when the grid has fewer than N+1 polar
    nodes (2N+2 azimuthal nodes), the size at which the product rule is exact.
    """
    if grid.resolution < Q.degree + 1:
        raise ResolutionError(
            f"grid resolution {grid.resolution} is too coarse for degree {Q.degree} (need >= {Q.degree + 1})"
        )
    return (Q.degree + 1) / math.pi * grid.integrate(_weight_abs2(Q, grid.z))


def poly_from_roots(roots) -> WeylPolynomial:
    """Monic polynomial ``prod (z - w_j)``."""
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    if np.any(is_inf(roots)):
        raise UnsupportedRootError("polynomials cannot have a root at infinity")
    return WeylPolynomial(np.poly(roots)[::-1].astype(complex), len(roots))


def normalized_root_product(roots) -> WeylPolynomial:
    """``prod (z - w_j)/sqrt(1+|w_j|^2)`` in ambient degree N.

    A root at infinity contributes the constant factor 1 (in homogeneous
    terms it is the factor of the second variable), which is the continuous
    limit of ``(z - w)/sqrt(1+|w|^2)`` up to a unimodular constant.
    """
    roots = list(np.atleast_1d(np.asarray(roots, dtype=complex)))
    c = np.array([1.0 + 0j])
    for w in roots:
        if is_inf(w):
            continue
        s = math.sqrt(1 + abs(w) ** 2)
        c = np.convolve(c, np.array([-w / s, 1 / s]))
    return WeylPolynomial.from_coeffs(c, len(roots))


@dataclass(frozen=True)
class BombieriResult:
    ratio: float
    lower: float
    upper: float
    lower_margin: float
    upper_margin: float

    @property
    def holds(self) -> bool:
        return self.lower_margin >= -1e-12 and self.upper_margin >= -1e-12


def bombieri_bounds(Q1: WeylPolynomial, Q2: WeylPolynomial) -> BombieriResult:
    """Ratio ``|Q1 Q2|^2 / (|Q1|^2 |Q2|^2)`` and its distance to ``[N1! N2!/N!, 1]``."""
    N1, N2 = Q1.degree, Q2.degree
    ratio = weyl_norm_sq(Q1 * Q2) / (weyl_norm_sq(Q1) * weyl_norm_sq(Q2))
    lower = 1.0 / float(binomial(N1 + N2, np.array([N1]))[0])
    return BombieriResult(ratio, lower, 1.0, ratio - lower, 1.0 - ratio)


def condition_number(P: WeylPolynomial, zeta: complex) -> float:
    """``sqrt(N) |P| (1+|zeta|^2)^((N-2)/2) / |P'(zeta)|``; +inf at multiple roots.

    Raises :class:`NotARootError` unless ``|P(zeta)| <= 1e-8 max|a_j|``.
    """
    if is_inf(zeta):
        raise UnsupportedRootError("condition number needs a finite root")
    zeta = complex(zeta)
    scale = float(np.max(np.abs(P.coeffs)))
    if abs(P(zeta)) > 1e-8 * scale:
        raise NotARootError(f"|P({zeta})| = {abs(P(zeta)):.3e} exceeds the root tolerance")
    d = abs(P.derivative(zeta))
    if d == 0:
        return math.inf
    N = P.degree
    return math.sqrt(N * weyl_norm_sq(P)) * (1 + abs(zeta) ** 2) ** ((N - 2) / 2) / d


def log_energy(cfg) -> float:
    """``sum_{j != k} log(1/|x_j - x_k|)`` over the lifted points; +inf on repeats."""
    w = np.atleast_1d(np.asarray(cfg, dtype=complex))
    d = sphere_distance(w[:, None], w[None, :])
    off = ~np.eye(len(w), dtype=bool)
    if np.any(d[off] == 0):
        return math.inf
    return float(-np.sum(np.log(d[off])))


def log_energy_plane(cfg) -> float:
    """The same energy as ``1/2 sum_{j != k} log((1+|w_j|^2)(1+|w_k|^2)/|w_j - w_k|^2)``."""
    w = np.atleast_1d(np.asarray(cfg, dtype=complex))
    if np.any(is_inf(w)):
        raise UnsupportedRootError("the plane form needs finite points")
    n2 = 1 + np.abs(w) ** 2
    diff = np.abs(w[:, None] - w[None, :]) ** 2
    off = ~np.eye(len(w), dtype=bool)
    if np.any(diff[off] == 0):
        return math.inf
    return float(0.5 * np.sum(np.log((n2[:, None] * n2[None, :])[off] / diff[off])))


def theta2_condition_form(cfg) -> float:
    """``e^N/(N(N+1)) exp(-(2/N) E_log) prod_j mu(P, w_j)^(2/N)`` for distinct finite roots.

    This is the beta = 2 packing integral of the configuration; the factor
    ``e^N`` comes from the constant 1/2 in the spherical Green function.
    """
    w = np.atleast_1d(np.asarray(cfg, dtype=complex))
    N = len(w)
    E = log_energy(w)
    if not math.isfinite(E):
        return math.inf
    P = poly_from_roots(w)
    logmu = 0.0
    for z in w:
        mu = condition_number(P, z)
        if not math.isfinite(mu):
            return math.inf
        logmu += math.log(mu)
    return math.exp(N - math.log(N * (N + 1)) - 2 * E / N + 2 * logmu / N)
