"""Packing integrals on the Riemann sphere.

For a configuration ``w_1..w_N`` and a charge ``beta`` the packing integral is

    (1/pi) int exp(beta sum_j U_S(z, w_j)) dA_S(z),

and the packing number is its infimum over configurations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .optimize import OptimSpec, PackingResult, minimize_configuration
from .quadrature import QuadResult, QuadSpec, group_points, integrate_adaptive
from .sphere import (
    INF,
    DivergentIntegralError,
    SphereGrid,
    build_sphere_grid,
    green_sphere,
    sphere_distance,
    sphere_moment,
)
from .weyl import normalized_root_product, weyl_norm_sq

__all__ = [
    "packing_integral",
    "packing_integral_beta2",
    "coalesced_value",
    "exact_grid_resolution",
    "estimate_theta",
    "RhoResult",
    "rho_zero_packing",
    "spiral_configuration",
    "covering_radius",
]

SPHERE_QUAD = QuadSpec(base_resolution=32, refinement_depth=2, singular_radius=0.02, target_rel_tol=1e-10)


def _as_cfg(cfg) -> np.ndarray:
    return np.atleast_1d(np.asarray(cfg, dtype=complex))


def coalesced_value(N: int, beta: float) -> float:
    """Packing integral with all N points at one place: ``2 e^(beta N/2)/(2 + N beta)``."""
    return sphere_moment(beta * N)


def packing_integral(cfg, beta: float, grid: SphereGrid | None = None, quad_spec: QuadSpec | None = None, full: bool = False):
    """``(1/pi) int exp(beta sum_j U_S(z, w_j)) dA_S``; points may be infinite.

    Without ``grid`` the integral is computed on Voronoi-cell grids adapted to
    the configuration (coincident points are merged, adding their charges)
    and refined until two levels agree to ``quad_spec.target_rel_tol``.
    """
    w = _as_cfg(cfg)
    N = len(w)
    if beta * N <= -2:
        raise DivergentIntegralError(f"beta*N = {beta * N} <= -2: the integral diverges")
    if beta == 0:
        res = QuadResult(1.0, 0.0, True, [1.0], 0)
        return res if full else 1.0
    pts, mult = group_points(list(w), sphere_distance)

    def f(z):
        s = np.zeros(np.shape(z))
        with np.errstate(divide="ignore"):
            for p, m in zip(pts, mult):
                s = s + m * green_sphere(z, p)
        return np.exp(beta * s)

    if grid is not None:
        value = grid.integrate(f(grid.z)) / math.pi
        res = QuadResult(value, math.nan, True, [value], len(grid))
    else:
        def log_f(grid):
            out = np.zeros(len(grid.z))
            with np.errstate(divide="ignore"):
                for i, (p, m) in enumerate(zip(pts, mult)):
                    # own cell: exact distance to the centre
                    out += m * np.where(grid.cell_ids == i, 0.5 + grid.log_dist, green_sphere(grid.z, p))
            return beta * out

        r = integrate_adaptive(
            log_f, "sphere", quad_spec or SPHERE_QUAD, singular=pts, exponents=list(beta * mult), log=True
        )
        res = QuadResult(r.value / math.pi, r.est_error / math.pi, r.converged, [v / math.pi for v in r.levels], r.n_nodes)
    return res if full else res.value


def packing_integral_beta2(cfg) -> float:
    """Closed form at ``beta = 2``: ``e^N |P|_N^2 / ((N+1) prod (1+|w_j|^2))``.

    Computed from the normalized factors ``(z - w)/sqrt(1+|w|^2)``, which also
    covers points at infinity.
    """
    w = _as_cfg(cfg)
    N = len(w)
    return math.exp(N) * weyl_norm_sq(normalized_root_product(w)) / (N + 1)


def exact_grid_resolution(N: int, beta: float) -> int | None:
    """Product-grid resolution that is exact for even integer ``beta``, else None.

    ``exp(beta sum U_S)`` is then a polynomial of degree ``beta N/2`` in the
    coordinates of R^3.
    """
    if beta > 0 and float(beta).is_integer() and int(beta) % 2 == 0:
        return int(beta) * N // 4 + 2
    return None


def _objective(N: int, beta: float, quad_spec: QuadSpec | None):
    if beta == 2:
        return packing_integral_beta2
    res = exact_grid_resolution(N, beta)
    if res is not None:
        grid = build_sphere_grid(res)
        return lambda cfg: packing_integral(cfg, beta, grid=grid)
    spec = quad_spec or QuadSpec(base_resolution=16, refinement_depth=0, target_rel_tol=1e-8)
    return lambda cfg: packing_integral(cfg, beta, quad_spec=spec)


def estimate_theta(N: int, beta: float, spec: OptimSpec = OptimSpec(), quad_spec: QuadSpec | None = None) -> PackingResult:
    """Upper estimate of the packing number by multi-start simplex descent.

    The objective during the search is the closed form (beta = 2), an exact
    product grid (other even beta) or a coarse adaptive quadrature; the
    reported value is re-evaluated with :func:`packing_integral` at full
    accuracy.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    obj = _objective(N, beta, quad_spec)
    result = minimize_configuration(obj, N, "sphere", spec, starts=[spiral_configuration(N)], beta=beta)
    final = packing_integral(result.configuration, beta, full=True)
    result.value = final.value
    result.est_error = final.est_error
    result.converged = result.converged and final.converged
    return result


@dataclass(frozen=True)
class RhoResult:
    rho: float
    a_opt: float
    m1: float
    m2: float


def rho_zero_packing(cfg, beta: float, grid: SphereGrid | None = None, quad_spec: QuadSpec | None = None) -> RhoResult:
    """``min_a (1/pi) int (a f - 1)^2 dA_S = 1 - m1^2/m2`` for the normalized product ``f``.

    ``f(z) = prod_j d(z, w_j)^beta``, so ``m1`` and ``m2`` are the packing
    integrals at ``beta`` and ``2 beta`` stripped of their ``e^(beta N/2)`` factors.
    """
    w = _as_cfg(cfg)
    N = len(w)
    m1 = packing_integral(w, beta, grid=grid, quad_spec=quad_spec) * math.exp(-beta * N / 2)
    m2 = packing_integral(w, 2 * beta, grid=grid, quad_spec=quad_spec) * math.exp(-beta * N)
    return RhoResult(rho=1 - m1 * m1 / m2, a_opt=m1 / m2, m1=m1, m2=m2)


def spiral_configuration(N: int) -> np.ndarray:
    """Generalized spiral points, returned as plane coordinates (the last one is infinity).

    Heights ``h_k = -1 + 2(k-1)/(N-1)`` on the unit sphere, with the azimuth
    advanced by ``3.6/sqrt(N (1 - h_k^2))`` between consecutive points.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return np.array([0j])
    k = np.arange(N)
    h = -1 + 2 * k / (N - 1)
    phi = np.zeros(N)
    for i in range(1, N - 1):
        phi[i] = (phi[i - 1] + 3.6 / math.sqrt(N * (1 - h[i] ** 2))) % (2 * math.pi)
    z = np.empty(N, dtype=complex)
    z[:-1] = np.sqrt((1 + h[:-1]) / (1 - h[:-1])) * np.exp(1j * phi[:-1])
    z[-1] = INF
    return z


def covering_radius(cfg, n_probe: int = 200_000) -> float:
    """Largest distance from a dense Fibonacci probe set to the configuration."""
    w = _as_cfg(cfg)
    k = np.arange(n_probe) + 0.5
    h = 1 - 2 * k / n_probe
    probe = np.sqrt((1 + h) / (1 - h)) * np.exp(1j * math.pi * (3 - math.sqrt(5)) * k)
    best = np.full(n_probe, np.inf)
    for p in w:
        best = np.minimum(best, sphere_distance(probe, p))
    return float(best.max())
