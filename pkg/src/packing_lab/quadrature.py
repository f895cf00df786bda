"""Quadrature on the sphere and on flat tori with point singularities.

The domain is split into the Voronoi cells of the announced singular points.
Each cell is integrated in polar coordinates about its own point: the
azimuth is cut into panels at the cell's vertices (Gauss-Legendre per panel,
or the periodic trapezoidal rule when the boundary has no corners) and the
radial variable is graded as ``s^k`` so that a factor ``dist^gamma`` becomes
``s^(k(gamma+2)/2 - 1)`` times a smooth function.  Other singular points lie
outside the cell, so inside it the integrand is smooth apart from the centre.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .elliptic import COVOLUME, Lattice, reduce_point
from .sphere import (
    INF,
    SphereGrid,
    chart_to_pole,
    is_inf,
    local_polar_points,
    sphere_distance,
)

__all__ = [
    "QuadSpec",
    "QuadResult",
    "TorusGrid",
    "CellRays",
    "sphere_cell_grid",
    "torus_cell_grid",
    "integrate_adaptive",
    "group_points",
    "log_disc_integral",
    "log_cell_integral",
    "disc_grid",
    "grading_for",
]


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature parameters.

    ``base_resolution`` is the number of radial nodes per cell (the angular
    count scales with it); ``singular_radius`` is the separation below which
    the resolution is doubled.
    """

    base_resolution: int = 32
    refinement_depth: int = 2
    singular_radius: float = 0.02
    target_rel_tol: float = 1e-10

    def __post_init__(self):
        if self.base_resolution < 16:
            raise ValueError("base_resolution must be >= 16")
        if self.target_rel_tol < 1e-12:
            raise ValueError("target_rel_tol must be >= 1e-12")


@dataclass
class QuadResult:
    value: float
    est_error: float
    converged: bool
    levels: list = field(default_factory=list)
    n_nodes: int = 0


@dataclass(frozen=True)
class CellRays:
    """Angular rule of one cell: azimuths, weights and boundary distance."""

    center: complex
    phi: np.ndarray
    wphi: np.ndarray
    radius: np.ndarray  # R(phi): geodesic angle on the sphere, length on the torus


@dataclass(frozen=True)
class TorusGrid:
    """Nodes and weights for ``dA`` on a fundamental domain (total mass pi/2)."""

    z: np.ndarray
    weights: np.ndarray
    singular_cells: tuple = ()
    rays: tuple = ()
    cell_ids: np.ndarray = None  # index into singular_cells for every node
    log_dist: np.ndarray = None  # log |node - centre of its cell|, exact
    log_weights: np.ndarray = None
    offset: np.ndarray = None  # node - centre of its cell, as a local coordinate

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values)))


def grading_for(gamma: float | None) -> int:
    """Even grading exponent k for a singular factor ``dist^gamma``.

    With ``r ~ s^(k/2)`` the radial integrand becomes a series in powers
    ``s^(k*gamma/2 + k - 1 + j*k/2)``; when ``k*gamma/2`` is an integer these are
    all polynomial and Gauss-Legendre converges geometrically.
    """
    if gamma is None:
        return 2
    if gamma <= -2:
        raise ValueError(f"singular exponent {gamma} is not integrable")
    for k in (2, 4, 6, 8, 10, 12):
        e = k * gamma / 2
        if abs(e - round(e)) < 1e-9:
            return k
    return 2 * math.ceil(6.0 / (gamma + 2.0))


_GEOM_RATIO = 0.25
_GEOM_PANELS = 26  # 4^-26 is about 2e-16


def _radial_rule(gamma: float | None, n: int):
    """Radial nodes ``s`` in (0, 1) and log weights for the measure ``d(s^k)``.

    Returns ``(s, log_s, log_w, k)``.  Normally this is Gauss-Legendre with
    the grading of :func:`grading_for`.  When ``-2 < gamma < -1`` and no even
    ``k <= 12`` makes the expansion polynomial, a single grading would need a
    huge ``k``; instead ``k = 2`` is used with geometric panels towards 0 and
    a product-integration rule for ``s^gamma`` on the innermost panel, which
    is accurate because the rest of the integrand is constant to ``O(s)`` there.
    """
    k = grading_for(gamma)
    if gamma is None or k <= 12:
        t, wt = leggauss(n)
        s, ws = (t + 1) / 2, wt / 2
        log_s = np.log(s)
        return s, log_s, math.log(k) + (k - 1) * log_s + np.log(ws), k
    t, wt = leggauss(max(8, n // 2))
    u, wu = (t + 1) / 2, wt / 2
    ss, lw = [], []
    for j in range(_GEOM_PANELS):
        hi = _GEOM_RATIO**j
        lo = hi * _GEOM_RATIO
        sj = lo + (hi - lo) * u
        ss.append(sj)
        lw.append(math.log(2.0) + np.log(sj) + np.log((hi - lo) * wu))
    sM = _GEOM_RATIO**_GEOM_PANELS
    sj = sM * u
    ss.append(sj)
    lw.append(math.log(2.0) + (gamma + 2) * math.log(sM) - math.log(gamma + 2) + np.log(wu) - gamma * np.log(sj))
    s = np.concatenate(ss)
    return s, np.log(s), np.concatenate(lw), 2


def group_points(points, dist, tol: float = 1e-12):
    """Merge coincident points; returns (unique_points, multiplicities)."""
    uniq, mult = [], []
    for p in points:
        for i, q in enumerate(uniq):
            if dist(p, q) <= tol:
                mult[i] += 1
                break
        else:
            uniq.append(p)
            mult.append(1)
    return uniq, np.array(mult)


def _find_breaks(bounds, n_sample: int = 1024) -> list:
    """Azimuths where the active boundary piece of R(phi) = min_k bounds_k changes."""
    # offset so that symmetric cells do not put a corner exactly on a sample
    phi = 2 * math.pi * (np.arange(n_sample) + 0.2718281828) / n_sample
    B = bounds(phi)
    if B.shape[1] <= 1:
        return []
    lab = np.argmin(B, axis=1)
    idx = np.nonzero(lab != np.roll(lab, -1))[0]
    breaks = []
    for i in idx:
        a = phi[i]
        b = a + 2 * math.pi / n_sample
        breaks.extend(_refine_break(bounds, a, b, lab[i], lab[(i + 1) % n_sample], 0))
    breaks = sorted(x % (2 * math.pi) for x in breaks)
    out = []
    for x in breaks:
        if not out or x - out[-1] > 1e-13:
            out.append(x)
    if len(out) > 1 and out[0] + 2 * math.pi - out[-1] <= 1e-13:
        out.pop()
    return out


def _refine_break(bounds, a, b, la, lb, depth):
    def g(x):
        v = bounds(np.array([x]))[0]
        return v[la] - v[lb]

    ga, gb = g(a), g(b)
    if ga == 0.0 or gb == 0.0:
        return [a if ga == 0.0 else b]
    if ga < 0 < gb or ga > 0 > gb:
        x = brentq(g, a, b, xtol=1e-15, rtol=1e-15)
        v = bounds(np.array([x]))[0]
        if np.argmin(v) in (la, lb) or v.min() >= min(v[la], v[lb]) - 1e-14:
            return [x]
    if depth > 6:
        return [(a + b) / 2]
    # a third boundary piece is active in between: split more finely
    sub = np.linspace(a, b, 33)
    lab = np.argmin(bounds(sub), axis=1)
    out = []
    for i in range(32):
        if lab[i] != lab[i + 1]:
            out.extend(_refine_break(bounds, sub[i], sub[i + 1], lab[i], lab[i + 1], depth + 1))
    return out


def _split_panel(a, b, poles, eta, depth=0):
    # bisect until the panel is short compared with its distance to the nearest
    # complex singularity of the boundary function R(phi)
    mid = 0.5 * (a + b)
    d = math.inf
    for c, eps in poles:
        c = mid + (c - mid + math.pi) % (2 * math.pi) - math.pi
        gap = max(0.0, a - c, c - b)
        d = min(d, math.hypot(gap, eps))
    if depth >= 40 or (b - a) <= eta * d:
        return [(a, b)]
    return _split_panel(a, mid, poles, eta, depth + 1) + _split_panel(mid, b, poles, eta, depth + 1)


def _angular_rule(breaks: list, n_periodic: int, n_panel: int, active_poles=None, eta: float = 1.0):
    """Azimuthal nodes and weights.

    ``active_poles(phi)`` returns the (real part, imaginary distance) pairs of
    the singularities of the boundary piece active at ``phi``.
    """
    if not breaks:
        phi = 2 * math.pi * np.arange(n_periodic) / n_periodic
        return phi, np.full(n_periodic, 2 * math.pi / n_periodic)
    t, w = leggauss(n_panel)
    edges = list(breaks) + [breaks[0] + 2 * math.pi]
    phis, ws = [], []
    for a0, b0 in zip(edges[:-1], edges[1:]):
        panels = [(a0, b0)]
        if active_poles is not None:
            panels = _split_panel(a0, b0, active_poles(0.5 * (a0 + b0)), eta)
        for a, b in panels:
            phis.append(a + (b - a) * (t + 1) / 2)
            ws.append(w * (b - a) / 2)
    return np.concatenate(phis), np.concatenate(ws)


def _pole_lookup(bounds, phi0, eps):
    def active(phi):
        k = int(np.argmin(bounds(np.array([phi]))[0]))
        return [(phi0[k] + math.pi / 2, eps[k]), (phi0[k] - math.pi / 2, eps[k])]

    return active


def _default_breaks(breaks, phi0, eps):
    # a boundary without corners still gets panels when its singularities are
    # close to the real axis, otherwise the periodic rule is used
    if breaks or len(phi0) == 0:
        return breaks
    k = int(np.argmin(eps))
    if eps[k] > 1.0:
        return []
    return sorted((phi0[k] + j * math.pi / 2) % (2 * math.pi) for j in range(4))


def _sphere_unit_local(ql):
    # unit vectors (in a frame where the pole is (0,0,-1)) of local chart points
    ql = np.asarray(ql, dtype=complex)
    inf = ~np.isfinite(ql)
    qf = np.where(inf, 0.0, ql)
    r2 = np.abs(qf) ** 2
    h = 2 * qf / (1 + r2)
    one_minus_c = np.where(inf, 2.0, 2 * r2 / (1 + r2))  # 1 - <pole, q>
    return np.where(inf, 0.0, h), one_minus_c


def sphere_cell_grid(points, exponents=None, resolution: int = 32, tol: float = 1e-12) -> SphereGrid:
    """Voronoi-cell polar quadrature for ``dA_S`` adapted to ``points``.

    ``exponents[j]`` is the power of the distance to ``points[j]`` expected in
    the integrand (default 0).  Coincident points must be merged beforehand
    (see :func:`group_points`); their exponents add.
    """
    pts = [INF if is_inf(p) else complex(p) for p in points]
    if not pts:
        pts = [0j]
    if exponents is None:
        exponents = [0.0] * len(pts)
    n_r = resolution
    zs, lws, rays, ids, lds = [], [], [], [], []
    for j, p in enumerate(pts):
        others = [q for i, q in enumerate(pts) if i != j]
        if others:
            h, omc = _sphere_unit_local(chart_to_pole(p, np.array(others)))
        else:
            h, omc = np.zeros(0, complex), np.zeros(0)
        if np.any(omc <= tol):
            raise ValueError("coincident points must be grouped before building cells")

        def bounds(phi, h=h, omc=omc):
            tdot = np.cos(phi)[:, None] * h.real[None, :] + np.sin(phi)[:, None] * h.imag[None, :]
            return np.arctan2(omc[None, :], tdot)

        phi0 = np.angle(h)
        with np.errstate(divide="ignore"):
            eps = np.arcsinh(omc / np.abs(h))
        breaks = _find_breaks(bounds) if len(others) > 1 else []
        breaks = _default_breaks(breaks, phi0, eps)
        phi, wphi = _angular_rule(
            breaks, 2 * n_r, max(8, n_r // 2), _pole_lookup(bounds, phi0, eps)
        )
        R = bounds(phi).min(axis=1) if len(others) else np.full(len(phi), math.pi)
        XR = 2 * np.sin(R / 2) ** 2  # 1 - cos R
        s, log_s, log_w, k = _radial_rule(exponents[j], n_r)
        logX = np.log(XR)[:, None] + k * log_s[None, :]
        X = np.exp(logX)
        lW = np.log(wphi * XR / 4.0)[:, None] + log_w[None, :]
        zs.append(local_polar_points(p, X, np.broadcast_to(phi[:, None], X.shape)).ravel())
        lws.append(lW.ravel())
        lds.append(0.5 * (logX - math.log(2.0)).ravel())  # chordal distance sqrt(X/2)
        ids.append(np.full(X.size, j))
        rays.append(CellRays(p, phi, wphi, R))
    log_weights = np.concatenate(lws)
    grid = SphereGrid(
        z=np.concatenate(zs),
        weights=np.exp(log_weights),
        singular=tuple(pts),
        resolution=resolution,
        cell_ids=np.concatenate(ids),
        log_dist=np.concatenate(lds),
        log_weights=log_weights,
    )
    object.__setattr__(grid, "rays", tuple(rays))
    return grid


def _torus_offsets(L: Lattice, pts: np.ndarray, j: int, reach: int = 3) -> np.ndarray:
    e1, e2 = L.reduced_basis
    m, n = np.meshgrid(np.arange(-reach, reach + 1), np.arange(-reach, reach + 1), indexing="ij")
    shifts = (m * e1 + n * e2).ravel()
    d0, _, _ = reduce_point(L, pts - pts[j])
    v = (d0[:, None] + shifts[None, :]).ravel()
    return v[np.abs(v) > 0]


def torus_cell_grid(
    L: Lattice, points, exponents=None, resolution: int = 32, tol: float = 1e-12, cells=None
) -> TorusGrid:
    """Voronoi-cell polar quadrature for ``dA`` on ``C/L`` adapted to ``points``.

    Without points the single cell is the Wigner-Seitz cell around 0.
    ``cells`` restricts the grid to the cells of the listed point indices.
    """
    pts = np.atleast_1d(np.asarray(points if len(points) else [0j], dtype=complex))
    pts, _, _ = reduce_point(L, pts)
    if exponents is None:
        exponents = [0.0] * len(pts)
    n_r = resolution
    zs, lws, rays, ids, lds, offs = [], [], [], [], [], []
    for j in range(len(pts)) if cells is None else cells:
        v = _torus_offsets(L, pts, j)
        if np.min(np.abs(v)) <= tol:
            raise ValueError("coincident points must be grouped before building cells")
        v = v[np.argsort(np.abs(v))]

        def make_bounds(v):
            vv = np.abs(v) ** 2

            def bounds(phi):
                tdot = np.cos(phi)[:, None] * v.real[None, :] + np.sin(phi)[:, None] * v.imag[None, :]
                return vv[None, :] / (2 * np.maximum(tdot, 1e-300))

            return bounds

        # first pass with the nearest offsets gives a cell containing the true one
        probe = 2 * math.pi * np.arange(256) / 256
        rmax = make_bounds(v[: min(len(v), 24)])(probe).min(axis=1).max() * 1.01
        v = v[np.abs(v) <= 2 * rmax]
        bounds = make_bounds(v)
        phi0 = np.angle(v)
        eps = np.zeros(len(v))
        breaks = _default_breaks(_find_breaks(bounds), phi0, eps)
        phi, wphi = _angular_rule(
            breaks, 2 * n_r, max(8, n_r // 2), _pole_lookup(bounds, phi0, eps)
        )
        R = bounds(phi).min(axis=1)
        s, log_s, log_w, k = _radial_rule(exponents[j], n_r)
        logr = np.log(R)[:, None] + (k / 2) * log_s[None, :]
        u = np.exp(logr) * np.exp(1j * phi)[:, None]
        lW = np.log(wphi * R**2 / 2)[:, None] + log_w[None, :]
        zs.append((pts[j] + u).ravel())
        offs.append(u.ravel())
        lws.append(lW.ravel())
        lds.append(logr.ravel())
        ids.append(np.full(u.size, j))
        rays.append(CellRays(complex(pts[j]), phi, wphi, R))
    log_weights = np.concatenate(lws)
    return TorusGrid(
        z=np.concatenate(zs),
        weights=np.exp(log_weights),
        log_dist=np.concatenate(lds),
        log_weights=log_weights,
        offset=np.concatenate(offs),
        singular_cells=tuple(
            (complex(p), None if e is None else float(e)) for p, e in zip(pts, exponents)
        ),
        rays=tuple(rays),
        cell_ids=np.concatenate(ids),
    )


def log_disc_integral(r0: float) -> float:
    """Closed form of the integral of ``log|z|`` over the disc of radius ``r0``."""
    return 2 * math.pi * (r0**2 / 2) * (math.log(r0) - 0.5)


def log_cell_integral(rays: CellRays) -> float:
    """Integral of ``log|z - c|`` over a star-shaped cell, exact along each ray."""
    R = rays.radius
    return float(np.sum(rays.wphi * R**2 / 2 * (np.log(R) - 0.5)))


def disc_grid(r0: float, n: int = 32, grading: int = 2):
    """Polar rule on the disc ``|z| < r0``; returns (nodes, weights)."""
    t, wt = leggauss(n)
    s, ws = (t + 1) / 2, wt / 2
    phi = 2 * math.pi * np.arange(2 * n) / (2 * n)
    r = r0 * s ** (grading / 2)
    W = np.outer(r0**2 * (grading / 2) * s ** (grading - 1) * ws, np.full(2 * n, 2 * math.pi / (2 * n)))
    return (r[:, None] * np.exp(1j * phi)[None, :]).ravel(), W.ravel()


def _min_separation(domain, pts) -> float:
    if len(pts) < 2:
        return math.inf
    if domain == "sphere":
        arr = np.array(pts)
        d = sphere_distance(arr[:, None], arr[None, :])
        return float(np.min(d[~np.eye(len(arr), dtype=bool)]))
    L = domain
    arr = np.array(pts, dtype=complex)
    d0, _, _ = reduce_point(L, arr[:, None] - arr[None, :])
    return float(np.min(np.abs(d0)[~np.eye(len(arr), dtype=bool)]))


def integrate_adaptive(
    f, domain, spec: QuadSpec = QuadSpec(), singular=(), exponents=None, cells=None, log: bool = False
) -> QuadResult:
    """Integrate ``f`` over the sphere (``dA_S``) or a torus ``C/L`` (``dA``).

    ``domain`` is ``"sphere"`` or a :class:`Lattice`.  ``f`` receives an array
    of complex nodes (possibly containing :data:`INF` on the sphere).  The
    rule is applied at successive doublings of the resolution; the error
    estimate is the difference between the last two levels, floored at the
    rounding level of the sum.  ``converged`` is False when that estimate
    exceeds ``target_rel_tol`` after ``refinement_depth`` doublings.
    On a torus, ``cells`` limits the integral to the Voronoi cells of the
    listed singular points.

    With ``log=True``, ``f`` receives the grid itself and returns the
    logarithm of the integrand.  The grid's ``cell_ids`` and ``log_dist``
    then give the exact distance from each node to the centre of its cell,
    which the plane coordinates of nodes very close to a centre cannot.
    """
    singular = list(singular)
    res = spec.base_resolution
    if _min_separation(domain, singular) < spec.singular_radius:
        res *= 2
    levels, value, est, n_nodes = [], math.nan, math.inf, 0
    for level in range(spec.refinement_depth + 1):
        if domain == "sphere":
            grid = sphere_cell_grid(singular, exponents, resolution=res)
        else:
            grid = torus_cell_grid(domain, singular, exponents, resolution=res, cells=cells)
        if log:
            with np.errstate(over="ignore"):
                terms = np.exp(grid.log_weights + np.asarray(f(grid), dtype=float))
        else:
            terms = grid.weights * np.asarray(f(grid.z), dtype=float)
        value = float(np.sum(terms))
        n_nodes = len(grid)
        floor = 64 * np.finfo(float).eps * float(np.sum(np.abs(terms)))
        levels.append(value)
        if level:
            est = max(abs(levels[-1] - levels[-2]), floor)
            if est <= spec.target_rel_tol * abs(value):
                return QuadResult(value, est, True, levels, n_nodes)
        res *= 2
    return QuadResult(value, est, False, levels, n_nodes)
