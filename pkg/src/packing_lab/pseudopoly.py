"""Toroidal pseudopolynomials.

The first-degree factor with root ``alpha`` is

    pi_alpha(z) = exp(2i Im(conj(alpha) z)) exp(-|z - alpha|^2) sigma_*(z - alpha),

whose modulus is Lambda-periodic.  Products of N such factors satisfy
``dbar F + N z F = 0`` and transform under lattice shifts by explicit
unimodular phase factors.  All products are formed in (log-modulus, phase)
form so that large N neither overflows nor underflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import COVOLUME, Lattice, sigma_star_polar
from .quadrature import QuadSpec, TorusGrid, group_points, integrate_adaptive
from .torus import cell_log_sigma_sum, torus_distance

__all__ = [
    "Pseudopolynomial",
    "pi_alpha",
    "pi_alpha_polar",
    "pseudo_eval",
    "pseudo_eval_polar",
    "pseudo_Lbeta_norm",
    "phase_factor",
    "root_shift_sign",
    "FiberResiduals",
    "fiber_residuals",
]


@dataclass(frozen=True)
class Pseudopolynomial:
    lattice: Lattice
    roots: np.ndarray
    leading: complex = 1.0

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.roots, dtype=complex))
        if len(r) < 1:
            raise ValueError("a pseudopolynomial needs at least one root")
        object.__setattr__(self, "roots", r)

    @property
    def N(self) -> int:
        return len(self.roots)

    def __call__(self, z):
        return pseudo_eval(self, z)


def pi_alpha_polar(L: Lattice, alpha: complex, z):
    """``(log|pi_alpha(z)|, arg pi_alpha(z))``."""
    z = np.asarray(z, dtype=complex)
    logmag, phase = sigma_star_polar(L, z - alpha)
    return logmag, phase + 2 * (np.conj(alpha) * z).imag


def pi_alpha(L: Lattice, alpha: complex, z):
    logmag, phase = pi_alpha_polar(L, alpha, z)
    with np.errstate(divide="ignore"):
        out = np.exp(logmag) * np.exp(1j * phase)
    return out if np.ndim(out) else complex(out)


def pseudo_eval_polar(P: Pseudopolynomial, z):
    z = np.asarray(z, dtype=complex)
    lam = complex(P.leading)
    with np.errstate(divide="ignore"):
        logmag = np.full(z.shape, math.log(abs(lam)) if lam != 0 else -math.inf)
    phase = np.full(z.shape, np.angle(lam))
    for a in P.roots:
        lm, ph = pi_alpha_polar(P.lattice, a, z)
        logmag = logmag + lm
        phase = phase + ph
    return logmag, np.mod(phase, 2 * math.pi)


def pseudo_eval(P: Pseudopolynomial, z):
    """``lambda * prod_j pi_{alpha_j}(z)``."""
    logmag, phase = pseudo_eval_polar(P, z)
    with np.errstate(divide="ignore"):
        out = np.exp(logmag) * np.exp(1j * phase)
    return out if np.ndim(out) else complex(out)


def pseudo_Lbeta_norm(P: Pseudopolynomial, beta: float, grid: TorusGrid | None = None, quad_spec: QuadSpec | None = None) -> float:
    """``int_{C/Lambda} |lambda Pi_alpha|^beta dA`` (the beta-th power of the norm)."""
    if beta <= 0:
        raise ValueError("beta must be positive")

    def f(z):
        logmag, _ = pseudo_eval_polar(P, z)
        return np.exp(beta * logmag)

    if grid is not None:
        return grid.integrate(f(grid.z))
    L = P.lattice
    pts, mult = group_points(list(P.roots), lambda a, b: torus_distance(L, a, b))
    if P.leading == 0:
        return 0.0
    log_lead = math.log(abs(P.leading))

    def log_f(grid):
        return beta * (log_lead + cell_log_sigma_sum(L, grid, pts, mult))

    res = integrate_adaptive(log_f, L, quad_spec or QuadSpec(), singular=pts, exponents=list(beta * mult), log=True)
    return res.value


def phase_factor(L: Lattice, j: int, gamma: complex, N: int, z):
    """``chi_j = (-1)^N exp(2i Im[conj(omega_j)(N z - 2 gamma)])`` for j in {1, 2}."""
    w = L.generators[j - 1]
    z = np.asarray(z, dtype=complex)
    return (-1) ** N * np.exp(2j * (np.conj(w) * (N * z - 2 * gamma)).imag)


def root_shift_sign(k1, k2):
    """Sign picked up by ``pi_alpha`` when alpha moves by ``k1 omega1 + k2 omega2``.

    It is ``-1`` unless both k1 and k2 are even, i.e. ``(-1)^(k1 + k2 + k1 k2)``.
    """
    k1, k2 = np.asarray(k1), np.asarray(k2)
    return np.where((k1 % 2 == 0) & (k2 % 2 == 0), 1, -1)


@dataclass(frozen=True)
class FiberResiduals:
    pde_residual: float
    periodicity_residual: float
    h: float


def fiber_residuals(P: Pseudopolynomial, gamma: complex, test_points, h: float | None = None) -> FiberResiduals:
    """Residuals of ``dbar F + N z F = 0`` and of the two shift laws with parameter ``gamma``.

    ``dbar = (d/dx + i d/dy)/2`` by centered differences with step ``h``
    (default 1e-3 times the shortest generator).
    """
    L = P.lattice
    N = P.N
    z = np.asarray(test_points, dtype=complex).ravel()
    if h is None:
        h = 1e-3 * L.min_length
    F = pseudo_eval(P, z)
    dx = (pseudo_eval(P, z + h) - pseudo_eval(P, z - h)) / (2 * h)
    dy = (pseudo_eval(P, z + 1j * h) - pseudo_eval(P, z - 1j * h)) / (2 * h)
    pde = np.max(np.abs(0.5 * (dx + 1j * dy) + N * z * F))
    per = 0.0
    for j in (1, 2):
        w = L.generators[j - 1]
        per = max(per, float(np.max(np.abs(pseudo_eval(P, z + w) - phase_factor(L, j, gamma, N, z) * F))))
    return FiberResiduals(float(pde), per, h)
