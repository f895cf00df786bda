"""Unipolar Green function of a flat torus and the sublattice refinement.

For a lattice of covolume pi/2 the Green function is

    U(z, w) = log|sigma_*(z - w)| - |z - w|^2 - A,

with the constant ``A`` fixed by requiring zero mean over the torus.  The
refinement ``Lambda_N`` is a superlattice containing ``Lambda`` with index N;
its cosets give N evenly spread points on ``C/Lambda``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import COVOLUME, Lattice, log_abs_sigma_star_periodic, normalize_lattice, reduce_point
from .quadrature import (
    QuadResult,
    QuadSpec,
    TorusGrid,
    group_points,
    integrate_adaptive,
    log_cell_integral,
    torus_cell_grid,
)
from .optimize import OptimSpec, PackingResult, minimize_configuration
from .sphere import DivergentIntegralError

__all__ = [
    "TorusGreen",
    "make_torus_green",
    "torus_distance",
    "compute_A_Lambda",
    "green_torus",
    "bipolar_green",
    "torus_moment",
    "torus_packing_integral",
    "LatticeRefinement",
    "refine_lattice",
    "coset_count",
    "renormalized_lattice",
    "verify_superposition",
    "TorusThetaResult",
    "torus_theta_at_lattice",
    "green_max",
    "cell_log_sigma_sum",
    "estimate_torus_theta",
    "DegeneratePoleError",
]


class DegeneratePoleError(ValueError):
    """The two poles of a bipolar Green function coincide on the torus."""


@dataclass(frozen=True)
class TorusGreen:
    lattice: Lattice
    A_Lambda: float
    quad_spec: QuadSpec = QuadSpec()


def torus_distance(L: Lattice, z, w):
    """Distance on ``C/L`` (length of the shortest representative of z - w)."""
    d0, _, _ = reduce_point(L, np.asarray(z, dtype=complex) - np.asarray(w, dtype=complex))
    e1, e2 = L.reduced_basis
    # the centered reduced cell is not the Voronoi cell; check the neighbours too
    best = np.abs(d0)
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            best = np.minimum(best, np.abs(d0 + m * e1 + n * e2))
    return best if np.ndim(best) else float(best)


def _levels(spec: QuadSpec):
    res = spec.base_resolution
    for _ in range(spec.refinement_depth + 1):
        yield res
        res *= 2


def _richardson(spec: QuadSpec, evaluate) -> QuadResult:
    """Run ``evaluate(resolution) -> (value, abs_sum, n_nodes)`` on doubling levels."""
    levels, est = [], math.inf
    for i, res in enumerate(_levels(spec)):
        value, abs_sum, n = evaluate(res)
        levels.append(value)
        if i:
            floor = 64 * np.finfo(float).eps * abs_sum
            est = max(abs(levels[-1] - levels[-2]), floor)
            if est <= spec.target_rel_tol * abs(value):
                return QuadResult(value, est, True, levels, n)
    return QuadResult(levels[-1], est, False, levels, n)


def compute_A_Lambda(L: Lattice, quad_spec: QuadSpec = QuadSpec(), offset: complex = 0j, full: bool = False):
    """Mean value ``(2/pi) int (log|sigma_*(z)| - |z|^2) dA`` over ``C/L``.

    The torus is split into the Voronoi cells of 0 (and of ``offset`` when it
    is nonzero, which gives a different fundamental domain).  In the cell of
    0 the integrand is written as ``log|z|`` plus a smooth remainder; the
    logarithm is integrated exactly along every ray of the polar rule.
    """
    pts = [0j] if offset == 0 else [0j, complex(offset)]

    def evaluate(res):
        grid = torus_cell_grid(L, pts, [None] * len(pts), resolution=res)
        h = log_abs_sigma_star_periodic(L, grid.z)
        in0 = grid.cell_ids == 0
        with np.errstate(divide="ignore"):
            h = np.where(in0, h - np.log(np.abs(grid.z)), h)
        terms = grid.weights * h
        total = float(np.sum(terms)) + log_cell_integral(grid.rays[0])
        return total / COVOLUME, float(np.sum(np.abs(terms))) / COVOLUME, len(grid)

    result = _richardson(quad_spec, evaluate)
    return result if full else result.value


def make_torus_green(L: Lattice, quad_spec: QuadSpec = QuadSpec()) -> TorusGreen:
    spec = dataclasses.replace(quad_spec, target_rel_tol=max(quad_spec.target_rel_tol, 1e-12))
    return TorusGreen(lattice=L, A_Lambda=compute_A_Lambda(L, spec), quad_spec=quad_spec)


def green_torus(G: TorusGreen, z, w):
    """``U(z, w) = log|sigma_*(z - w)| - |z - w|^2 - A``; -inf when z = w on the torus."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    with np.errstate(divide="ignore"):
        out = log_abs_sigma_star_periodic(G.lattice, z - w) - G.A_Lambda
    return out if np.ndim(out) else float(out)


def bipolar_green(G: TorusGreen, z, w, wprime):
    """``U(z, w) - U(z, w')``; the constant A cancels."""
    if torus_distance(G.lattice, w, wprime) < 1e-12:
        raise DegeneratePoleError("poles coincide modulo the lattice")
    L = G.lattice
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = log_abs_sigma_star_periodic(L, z - w) - log_abs_sigma_star_periodic(L, z - wprime)
    return out if np.ndim(out) else float(out)


def _green_sum(G: TorusGreen, z, pts, mult):
    s = np.zeros(np.shape(z))
    with np.errstate(divide="ignore"):
        for p, m in zip(pts, mult):
            s = s + m * log_abs_sigma_star_periodic(G.lattice, z - p)
    return s - float(np.sum(mult)) * G.A_Lambda


def cell_log_sigma_sum(L: Lattice, grid: TorusGrid, pts, mult) -> np.ndarray:
    """``sum_j m_j (log|sigma_*(z - p_j)| - |z - p_j|^2)`` at the nodes of a cell grid.

    In the cell of ``p_j`` the logarithmic part of its own term is taken from
    the exact local distance; only the smooth remainder is evaluated at the
    local offset.
    """
    out = np.zeros(len(grid.z))
    with np.errstate(divide="ignore"):
        for i, (p, m) in enumerate(zip(pts, mult)):
            g = log_abs_sigma_star_periodic(L, grid.z - p)
            own = grid.cell_ids == i
            if np.any(own):
                u = grid.offset[own]
                g[own] = grid.log_dist[own] + (log_abs_sigma_star_periodic(L, u) - np.log(np.abs(u)))
            out += m * g
    return out


def torus_packing_integral(
    G: TorusGreen,
    cfg,
    beta: float,
    grid: TorusGrid | None = None,
    quad_spec: QuadSpec | None = None,
    full: bool = False,
    cells=None,
):
    """``(2/pi) int exp(beta sum_j U(z, w_j)) dA`` over the torus.

    With ``grid`` the given rule is used as is; otherwise the integral is
    computed on Voronoi-cell grids of the configuration, refined until two
    levels agree.  ``cells`` restricts the integral to some of the cells (the
    caller is then responsible for the symmetry that makes this meaningful).
    """
    cfg = np.atleast_1d(np.asarray(cfg, dtype=complex))
    N = len(cfg)
    if beta * N <= -2:
        raise DivergentIntegralError(f"beta*N = {beta * N} <= -2: the integral diverges")
    L = G.lattice
    if beta == 0:
        res = QuadResult(1.0, 0.0, True, [1.0], 0)
        return res if full else 1.0
    pts, mult = group_points(list(reduce_point(L, cfg)[0]), lambda a, b: torus_distance(L, a, b))

    def f(z):
        return np.exp(beta * _green_sum(G, z, pts, mult))

    if grid is not None:
        value = grid.integrate(f(grid.z)) / COVOLUME
        res = QuadResult(value, math.nan, True, [value], len(grid))
    else:
        spec = quad_spec or G.quad_spec
        total = float(np.sum(mult))

        def log_f(grid):
            return beta * (cell_log_sigma_sum(L, grid, pts, mult) - total * G.A_Lambda)

        res = integrate_adaptive(log_f, L, spec, singular=pts, exponents=list(beta * mult), cells=cells, log=True)
        res = QuadResult(res.value / COVOLUME, res.est_error / COVOLUME, res.converged,
                         [v / COVOLUME for v in res.levels], res.n_nodes)
    return res if full else res.value


def torus_moment(G: TorusGreen, beta: float, pole: complex = 0j, quad_spec: QuadSpec | None = None, full: bool = False):
    """``E(beta) = (2/pi) int exp(beta U(z, pole)) dA``."""
    if beta <= -2:
        raise DivergentIntegralError(f"beta={beta} <= -2: the moment diverges")
    return torus_packing_integral(G, [pole], beta, quad_spec=quad_spec, full=full)


@dataclass(frozen=True)
class LatticeRefinement:
    """Superlattice ``Lambda_N`` of index N over ``Lambda`` and its cosets.

    ``coset_coords`` holds integer pairs (p, q) with coset point
    ``(p omega1 + q omega2)/N``.
    """

    lattice: Lattice
    N: int
    a_N: int
    b_N: int
    omega1N: complex
    omega2N: complex
    coset_coords: np.ndarray

    @property
    def cosets(self) -> np.ndarray:
        p, q = self.coset_coords[:, 0], self.coset_coords[:, 1]
        w1, w2 = self.lattice.generators
        return (p * w1 + q * w2) / self.N


def _coset_coords(N: int, a: int, b: int) -> np.ndarray:
    """Integer coordinates (units of 1/N, basis omega1, omega2) of Lambda_N/Lambda.

    omega1N = (a, 1)/N and omega2N = (-b, a)/N.  The multiples i*omega1N,
    0 <= i < N, are distinct mod Lambda (second coordinate i/N), and
    a*omega1N = (a^2, a)/N = omega2N mod Lambda because a^2 + b = N, so these
    N multiples are the whole quotient.
    """
    if (a * a) % N != (-b) % N:
        raise ArithmeticError("omega2N is not a multiple of omega1N")
    i = np.arange(N, dtype=np.int64)
    return np.stack([(i * a) % N, i], axis=1)


def refine_lattice(L: Lattice, N: int) -> LatticeRefinement:
    """Build ``Lambda_N`` with generators ``((a, 1), (-b, a)) (omega1, omega2)^T / N``."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    a = math.isqrt(N)
    b = N - a * a
    w1, w2 = L.generators
    return LatticeRefinement(
        lattice=L,
        N=N,
        a_N=a,
        b_N=b,
        omega1N=(a * w1 + w2) / N,
        omega2N=(-b * w1 + a * w2) / N,
        coset_coords=_coset_coords(N, a, b),
    )


def coset_count(R: LatticeRefinement) -> int:
    """Number of distinct cosets, by exact integer reduction of the listed points."""
    c = np.asarray(R.coset_coords) % R.N
    return len(np.unique(c[:, 0] * R.N + c[:, 1]))


def renormalized_lattice(R: LatticeRefinement) -> Lattice:
    """``sqrt(N) Lambda_N`` as a normalized lattice; its ``frame`` maps into it."""
    s = math.sqrt(R.N)
    return normalize_lattice(s * R.omega1N, s * R.omega2N)


def verify_superposition(G: TorusGreen, R: LatticeRefinement, test_points=None, G_prime: TorusGreen | None = None):
    """Largest deviation between ``sum_j U(z, zeta_j)`` and ``U_{Lambda_N}(z, 0)``.

    The right side goes through ``U_{Lambda'_N}(sqrt(N) z, 0)`` on the
    renormalized lattice.  Test points closer than 1e-3 to a coset are dropped.
    """
    L = G.lattice
    if test_points is None:
        s, t = np.meshgrid((np.arange(64) + 0.37) / 64, (np.arange(64) + 0.61) / 64, indexing="ij")
        test_points = L.point(s, t).ravel()
    z = np.asarray(test_points, dtype=complex).ravel()
    cos = R.cosets
    d = torus_distance(L, z[:, None], cos[None, :]).min(axis=1)
    z = z[d >= 1e-3]
    if G_prime is None:
        G_prime = make_torus_green(renormalized_lattice(R), G.quad_spec)
    lhs = _green_sum(G, z, cos, np.ones(len(cos)))
    rhs = green_torus(G_prime, G_prime.lattice.frame * math.sqrt(R.N) * z, 0j)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class TorusThetaResult:
    value: float
    renormalized_value: float
    rel_diff: float
    N: int
    beta: float
    est_error: float
    converged: bool


def torus_theta_at_lattice(
    G: TorusGreen, N: int, beta: float, G_prime: TorusGreen | None = None, quad_spec: QuadSpec | None = None
) -> TorusThetaResult:
    """Packing integral at the coset configuration of ``Lambda_N``, two ways.

    The direct route sums the N Green functions of ``Lambda``.  The coset set
    is invariant under translation by ``omega1N``, which permutes the Voronoi
    cells, so the integral equals N times the integral over the cell of 0.
    The second route is ``E(beta, Lambda'_N)`` on the renormalized lattice.
    """
    R = refine_lattice(G.lattice, N)
    spec = quad_spec or G.quad_spec
    if beta == 0:
        return TorusThetaResult(1.0, 1.0, 0.0, N, beta, 0.0, True)
    cos = R.cosets
    # exact check that adding omega1N = (a, 1)/N permutes the cosets
    c = R.coset_coords
    shifted = ((c[:, 0] + R.a_N) % N) * N + (c[:, 1] + 1) % N
    if set(shifted.tolist()) != set((c[:, 0] * N + c[:, 1]).tolist()):
        raise ArithmeticError("coset set is not invariant under omega1N")
    direct = torus_packing_integral(G, cos, beta, quad_spec=spec, full=True, cells=[0])
    value = N * direct.value
    if G_prime is None:
        G_prime = make_torus_green(renormalized_lattice(R), spec)
    other = torus_moment(G_prime, beta, quad_spec=spec)
    return TorusThetaResult(
        value=value,
        renormalized_value=other,
        rel_diff=abs(value - other) / abs(other),
        N=N,
        beta=beta,
        est_error=N * direct.est_error,
        converged=direct.converged,
    )


def green_max(G: TorusGreen, n: int = 128) -> float:
    """Maximum of ``U(., 0)`` over an ``n x n`` grid of the fundamental rhombus."""
    s, t = np.meshgrid((np.arange(n) + 0.5) / n, (np.arange(n) + 0.5) / n, indexing="ij")
    return float(np.max(green_torus(G, G.lattice.point(s, t), 0j)))


def estimate_torus_theta(
    G: TorusGreen, N: int, beta: float, spec: OptimSpec = OptimSpec(), quad_spec: QuadSpec | None = None
) -> PackingResult:
    """Upper estimate of the torus packing number, starting from the coset configuration.

    The search runs on a single coarse level; the reported value is
    re-evaluated at full accuracy.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    coarse = quad_spec or QuadSpec(base_resolution=16, refinement_depth=0)
    start = refine_lattice(G.lattice, N).cosets

    def objective(cfg):
        return torus_packing_integral(G, cfg, beta, quad_spec=coarse)

    result = minimize_configuration(objective, N, G.lattice, spec, starts=[start], beta=beta)
    final = torus_packing_integral(G, result.configuration, beta, full=True)
    result.value = final.value
    result.est_error = final.est_error
    result.converged = result.converged and final.converged
    return result
