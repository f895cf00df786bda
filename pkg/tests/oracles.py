"""Independent oracles used to freeze and cross-check expected values.

None of these go through the production code paths they check.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np


def eisenstein(e1: complex, e2: complex, k: int, terms: int = 60) -> complex:
    """G_k = sum over nonzero lattice vectors of w^-k, via q-expansions."""
    tau = e2 / e1
    q = np.exp(2j * np.pi * tau)
    n = np.arange(1, terms + 1)
    sig3 = np.array([sum(d**3 for d in range(1, m + 1) if m % d == 0) for m in n])
    sig5 = np.array([sum(d**5 for d in range(1, m + 1) if m % d == 0) for m in n])
    E4 = 1 + 240 * np.sum(sig3 * q**n)
    E6 = 1 - 504 * np.sum(sig5 * q**n)
    G4 = 2 * (math.pi**4 / 90) * E4 / e1**4
    G6 = 2 * (math.pi**6 / 945) * E6 / e1**6
    if k == 4:
        return G4
    if k == 6:
        return G6
    if k == 8:
        return 3 * G4**2 / 7
    if k == 10:
        return 5 * G4 * G6 / 11
    raise ValueError(k)


def sigma_product(e1: complex, e2: complex, z, radius: float = 14.0) -> np.ndarray:
    """sigma(z) from the Weierstrass product over |w| <= radius.

    The tail beyond the disc is restored through the expansion
    log(1-u)+u+u^2/2 = -sum_{k>=3} u^k/k; odd powers cancel over the symmetric
    disc and the even ones are closed with Eisenstein series G_4..G_10.  The
    neglected remainder is below 1e-13 for |z| <= 1.5.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    M = int(radius / min(abs(e1), abs(e2) * abs((e2 / e1).imag))) + 3
    m, n = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1), indexing="ij")
    w = (m * e1 + n * e2).ravel()
    w = w[(np.abs(w) <= radius) & (w != 0)]
    out = np.log(z)
    for chunk in np.array_split(w, max(1, len(w) // 400)):
        u = z[:, None] / chunk[None, :]
        out = out + np.sum(np.log(1 - u) + u + u**2 / 2, axis=1)
    for k in (4, 6, 8, 10):
        tail = eisenstein(e1, e2, k) - np.sum(w ** (-k))
        out = out - z**k / k * tail
    return np.exp(out)


def sigma_mp(e1: complex, e2: complex, z: complex, dps: int = 30) -> complex:
    """sigma via mpmath's jtheta at high precision (independent of numpy code)."""
    with mpmath.workdps(dps):
        e1m, e2m, zm = mpmath.mpc(e1), mpmath.mpc(e2), mpmath.mpc(z)
        tau = e2m / e1m
        q = mpmath.exp(1j * mpmath.pi * tau)
        d1 = mpmath.jtheta(1, 0, q, 1)
        d3 = mpmath.jtheta(1, 0, q, 3)
        lam = -mpmath.pi**2 * d3 / (3 * e1m * d1)
        v = mpmath.pi * zm / e1m
        val = (e1m / mpmath.pi) * mpmath.exp(lam * zm**2 / (2 * e1m)) * mpmath.jtheta(1, v, q) / d1
        return complex(val)


def uniform_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the sphere of radius 1/2 centred at (0, 0, 1/2)."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return 0.5 * v + np.array([0.0, 0.0, 0.5])


def poly_from_roots_mp(roots, dps: int = 50) -> list:
    """Monic expansion prod (z - r) by repeated synthetic multiplication."""
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpc(1)]  # highest degree first
        for r in roots:
            r = mpmath.mpc(r)
            new = coeffs + [mpmath.mpc(0)]
            for i in range(1, len(new)):
                new[i] -= r * coeffs[i - 1]
            coeffs = new
        return [complex(c) for c in reversed(coeffs)]  # ascending powers


def binom_weyl_norm_mp(coeffs, dps: int = 40) -> float:
    N = len(coeffs) - 1
    with mpmath.workdps(dps):
        return float(sum(abs(mpmath.mpc(a)) ** 2 / mpmath.binomial(N, j) for j, a in enumerate(coeffs)))
