"""Independent reference computations used to check the main code paths.

Nothing here calls the quadrature engine, the cell grids, the closed forms
under test or the coset enumeration; each oracle is a different method
(Monte Carlo, exact rational arithmetic, brute force, grid search).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .elliptic import Lattice, _log_sigma_reduced

__all__ = [
    "mc_sphere_packing",
    "mc_torus_mean",
    "exact_poly_from_roots",
    "exact_condition_number",
    "brute_force_cosets",
    "antipodal_grid_search",
]


def _uniform_sphere_plane(n: int, rng: np.random.Generator) -> np.ndarray:
    # uniform on the unit sphere, then stereographic coordinates; the radius-1/2
    # sphere has the same projection up to scaling of R^3
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return (v[:, 0] + 1j * v[:, 1]) / (1 - v[:, 2])


def mc_sphere_packing(cfg, beta: float, n: int = 10**7, seed: int = 0, chunk: int = 10**6):
    """Monte Carlo mean of ``exp(beta sum_j (1/2 + log d(z, w_j)))`` under uniform ``z``.

    Returns (mean, standard error).  Distances are computed from the chordal
    formula directly; a point at infinity uses ``1/sqrt(1+|z|^2)``.
    """
    rng = np.random.default_rng(seed)
    cfg = [complex(w) for w in np.atleast_1d(cfg)]
    s1 = s2 = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        z = _uniform_sphere_plane(m, rng)
        logf = np.zeros(m)
        for w in cfg:
            if not math.isfinite(abs(w)):
                d = 1 / np.sqrt(1 + np.abs(z) ** 2)
            else:
                d = np.abs(z - w) / np.sqrt((1 + np.abs(z) ** 2) * (1 + abs(w) ** 2))
            logf += 0.5 + np.log(d)
        f = np.exp(beta * logf)
        s1 += f.sum()
        s2 += (f * f).sum()
        done += m
    mean = s1 / n
    return mean, math.sqrt(max(s2 / n - mean * mean, 0.0) / n)


def mc_torus_mean(L: Lattice, func, n: int = 10**7, seed: int = 0, chunk: int = 10**6):
    """Monte Carlo mean of ``func(h)`` with ``h = log|sigma_*(z)| - |z|^2``, z uniform on the rhombus.

    ``h`` is evaluated from the theta series at the unreduced point
    ``z = s omega1 + t omega2``; returns (mean, standard error).
    """
    rng = np.random.default_rng(seed)
    s1 = s2 = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        z = L.point(rng.random(m), rng.random(m))
        with np.errstate(divide="ignore"):
            h = (L.b * z**2 + _log_sigma_reduced(L, z)).real - np.abs(z) ** 2
        f = func(h)
        s1 += f.sum()
        s2 += (f * f).sum()
        done += m
    mean = s1 / n
    return mean, math.sqrt(max(s2 / n - mean * mean, 0.0) / n)


def exact_poly_from_roots(roots) -> np.ndarray:
    """Ascending coefficients of ``prod (z - r)`` in exact rational arithmetic."""
    coeffs = [(Fraction(1), Fraction(0))]  # ascending, (re, im)
    for r in np.atleast_1d(roots):
        r = complex(r)
        a, b = Fraction(r.real), Fraction(r.imag)
        new = [(Fraction(0), Fraction(0))] * (len(coeffs) + 1)
        for k, (cr, ci) in enumerate(coeffs):
            # z * c
            nr, ni = new[k + 1]
            new[k + 1] = (nr + cr, ni + ci)
            # -r * c
            nr, ni = new[k]
            new[k] = (nr - (a * cr - b * ci), ni - (a * ci + b * cr))
        coeffs = new
    return np.array([complex(float(re), float(im)) for re, im in coeffs])


def exact_condition_number(coeffs, zeta) -> float:
    """Condition number of a root from the squared formula in exact rational arithmetic.

    ``mu^2 = N |P|^2 (1+|zeta|^2)^(N-2) / |P'(zeta)|^2`` with ascending
    Gaussian-rational ``coeffs``; only the final square root is a float.
    """
    c = [(Fraction(complex(a).real), Fraction(complex(a).imag)) for a in coeffs]
    N = len(c) - 1
    zr, zi = Fraction(complex(zeta).real), Fraction(complex(zeta).imag)
    norm = sum((a * a + b * b) / math.comb(N, j) for j, (a, b) in enumerate(c))
    # Horner for P'(zeta)
    dr, di = Fraction(0), Fraction(0)
    for j in range(N, 0, -1):
        a, b = c[j]
        dr, di = dr * zr - di * zi + j * a, dr * zi + di * zr + j * b
    d2 = dr * dr + di * di
    if d2 == 0:
        return math.inf
    w = 1 + zr * zr + zi * zi
    mu2 = N * norm * (w ** (N - 2) if N >= 2 else 1 / w ** (2 - N)) / d2
    return math.sqrt(mu2)


def brute_force_cosets(L: Lattice, w1N: complex, w2N: complex, N: int) -> np.ndarray:
    """All ``i w1N + j w2N``, 0 <= i, j < N, reduced into the rhombus and deduplicated.

    Reduction rounds lattice coordinates; duplicates are merged within
    ``1e-9`` times the generator length.
    """
    i, j = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    z = (i * w1N + j * w2N).ravel()
    s, t = L.coordinates(z)
    s, t = s - np.floor(s + 1e-12), t - np.floor(t + 1e-12)
    tol = 1e-9 * abs(L.omega1)
    kept: list[complex] = []
    for zz in L.point(s, t):
        if all(_torus_gap(L, zz, k) > tol for k in kept):
            kept.append(zz)
    return np.array(kept)


def _torus_gap(L: Lattice, a: complex, b: complex) -> float:
    s, t = L.coordinates(a - b)
    s, t = s - round(s), t - round(t)
    return min(abs(L.point(s + di, t + dj)) for di in (-1, 0, 1) for dj in (-1, 0, 1))


def antipodal_grid_search(beta: float = 2.0, n: int = 2001):
    """Grid search over the spherical distance of a two-point configuration.

    By rotation invariance the pair can be taken as ``{0, r}``; the packing
    integral is evaluated with a fine polar product rule in the plane that is
    independent of the library grids.  Returns (best distance, values).
    """
    dist = np.linspace(0.05, 1.0, n)
    # d = r / sqrt(1 + r^2) for the pair {0, r}
    r = np.where(dist < 1, dist / np.sqrt(np.maximum(1 - dist**2, 1e-300)), np.inf)
    # polar rule: u = |z|^2/(1+|z|^2) uniform in (0, 1) carries dA_S / pi
    nu, nphi = 200, 64
    u = (np.arange(nu) + 0.5) / nu
    phi = 2 * math.pi * (np.arange(nphi) + 0.5) / nphi
    rho = np.sqrt(u / (1 - u))
    z = (rho[:, None] * np.exp(1j * phi)[None, :]).ravel()
    d0 = np.abs(z) / np.sqrt(1 + np.abs(z) ** 2)
    vals = []
    for rk in r:
        if np.isfinite(rk):
            d1 = np.abs(z - rk) / np.sqrt((1 + np.abs(z) ** 2) * (1 + rk**2))
        else:
            d1 = 1 / np.sqrt(1 + np.abs(z) ** 2)
        vals.append(np.mean(np.exp(beta * (1 + np.log(d0) + np.log(d1)))))
    vals = np.array(vals)
    return float(dist[int(np.argmin(vals))]), vals
