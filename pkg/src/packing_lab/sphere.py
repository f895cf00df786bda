"""Riemann sphere geometry on the sphere of radius 1/2 centred at (0, 0, 1/2).

Points of the extended plane are plain Python/numpy complex numbers; the point
at infinity is any value with a non-finite component (use :data:`INF`).  All
formulas branch on it explicitly and use the continuous extensions, so no large
finite surrogate ever enters a computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "INF",
    "is_inf",
    "stereo_project",
    "stereo_lift",
    "sphere_distance",
    "chordal_distance",
    "green_sphere",
    "sphere_moment",
    "SphereGrid",
    "build_sphere_grid",
    "mobius_rotate",
    "chart_from_pole",
    "chart_to_pole",
    "local_polar_points",
    "DivergentIntegralError",
]

INF = complex(math.inf, 0.0)
CENTER = np.array([0.0, 0.0, 0.5])


class DivergentIntegralError(ValueError):
    """The requested exponential moment does not converge."""


def is_inf(z):
    z = np.asarray(z, dtype=complex)
    out = ~np.isfinite(z)
    return out if out.ndim else bool(out)


def stereo_project(p):
    """Map points ``(a, b, c)`` of the sphere to ``(a + ib)/(1 - c)``.

    The north pole ``(0, 0, 1)`` goes to :data:`INF`.  ``p`` has shape (..., 3).
    """
    p = np.asarray(p, dtype=float)
    a, b, c = p[..., 0], p[..., 1], p[..., 2]
    denom = 1.0 - c
    north = denom <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (a + 1j * b) / np.where(north, 1.0, denom)
    z = np.where(north, INF, z)
    return z if z.ndim else complex(z)


def stereo_lift(z):
    """Inverse stereographic projection; returns an array of shape (..., 3)."""
    z = np.asarray(z, dtype=complex)
    inf = ~np.isfinite(z)
    zf = np.where(inf, 0.0, z)
    r2 = np.abs(zf) ** 2
    out = np.stack([zf.real / (1 + r2), zf.imag / (1 + r2), r2 / (1 + r2)], axis=-1)
    out[inf] = (0.0, 0.0, 1.0)
    return out


def chordal_distance(p, q):
    """Euclidean distance between sphere points given in R^3."""
    return np.linalg.norm(np.asarray(p) - np.asarray(q), axis=-1)


def sphere_distance(z, w):
    """Spherical chordal distance ``|z-w| / sqrt((1+|z|^2)(1+|w|^2))``, in [0, 1]."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zi, wi = ~np.isfinite(z), ~np.isfinite(w)
    zf, wf = np.where(zi, 0.0, z), np.where(wi, 0.0, w)
    nz, nw = np.sqrt(1 + np.abs(zf) ** 2), np.sqrt(1 + np.abs(wf) ** 2)
    d = np.abs(zf - wf) / (nz * nw)
    d = np.where(zi & ~wi, 1.0 / nw, d)
    d = np.where(wi & ~zi, 1.0 / nz, d)
    d = np.where(zi & wi, 0.0, d)
    d = np.minimum(d, 1.0)
    return d if d.ndim else float(d)


def green_sphere(z, w):
    """Unipolar Green function ``1/2 + log d(z, w)``; equals -inf at ``z = w``."""
    with np.errstate(divide="ignore"):
        out = 0.5 + np.log(sphere_distance(z, w))
    return out if np.ndim(out) else float(out)


def sphere_moment(alpha: float) -> float:
    """Exact value of ``(1/pi) int exp(alpha U_S(z, w)) dA_S(z)``, any ``w``."""
    if alpha <= -2:
        raise DivergentIntegralError(f"alpha={alpha} <= -2: the moment diverges")
    return 2.0 * math.exp(alpha / 2) / (2.0 + alpha)


def mobius_rotate(z, c):
    """Rotation of the sphere ``z -> (z - c)/(1 + conj(c) z)``, extended to infinity."""
    z = np.asarray(z, dtype=complex)
    c = complex(c)
    if not math.isfinite(abs(c)):
        # limit c -> infinity of the same map is z -> -1/z up to a unimodular factor
        raise ValueError("rotation centre must be finite")
    zi = ~np.isfinite(z)
    zf = np.where(zi, 0.0, z)
    den = 1 + c.conjugate() * zf
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (zf - c) / den
    out = np.where(den == 0, INF, out)
    # z = inf maps to 1/conj(c), or to inf when c = 0
    img_inf = INF if c == 0 else 1 / c.conjugate()
    out = np.where(zi, img_inf, out)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature nodes on the sphere with weights for ``dA_S`` (total mass pi).

    Nodes are stored as points of the extended plane; ``points`` gives their
    lifts to R^3.  ``singular`` lists the chart centres the nodes are graded
    towards.
    """

    z: np.ndarray
    weights: np.ndarray
    singular: tuple = ()
    resolution: int = 0
    # cell grids only: owning cell per node, log of the exact distance to that
    # cell's centre, and log weights (both free of rounding near the centre)
    cell_ids: np.ndarray = None
    log_dist: np.ndarray = None
    log_weights: np.ndarray = None

    @property
    def points(self):
        return stereo_lift(self.z)

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        values = np.asarray(values)
        # fixed summation order so results do not depend on how values were produced
        return float(np.sum(self.weights * values))


def chart_from_pole(p, zlocal):
    """Map local coordinates around ``p`` (where ``p`` sits at 0) back to the plane.

    The chart is the rotation ``z -> (z - p)/(1 + conj(p) z)`` (or ``-1/z``
    when ``p`` is infinity), so ``tan(rho/2) e^{i phi}`` is the point at
    geodesic angle ``rho`` from ``p``.  Working from exact local coordinates
    avoids the cancellation in ``1 - c`` near the north pole.
    """
    zl = np.asarray(zlocal, dtype=complex)
    if is_inf(p):
        with np.errstate(divide="ignore"):
            out = np.where(zl == 0, INF, -1.0 / np.where(zl == 0, 1.0, zl))
    else:
        p = complex(p)
        den = 1.0 - p.conjugate() * zl
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, INF, (zl + p) / np.where(den == 0, 1.0, den))
    return out


def chart_to_pole(p, z):
    """Inverse of :func:`chart_from_pole`: local coordinates of ``z`` around ``p``."""
    z = np.asarray(z, dtype=complex)
    if is_inf(p):
        zi = ~np.isfinite(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z == 0, INF, -1.0 / np.where(z == 0, 1.0, z))
        return np.where(zi, 0.0, out)
    return mobius_rotate(z, p)


def local_polar_points(p, one_minus_cos, phi):
    """Plane coordinates of the points at ``1 - cos(rho)`` and azimuth ``phi`` around ``p``."""
    x = np.asarray(one_minus_cos, dtype=float)
    rad = np.sqrt(x / np.maximum(2.0 - x, 1e-300))
    zl = np.where(x >= 2.0, INF, rad * np.exp(1j * np.asarray(phi)))
    return chart_from_pole(p, zl)


def build_sphere_grid(resolution: int, center=None, grading: int | None = None) -> SphereGrid:
    """Gauss-Legendre x uniform-azimuth product grid for ``dA_S``.

    With ``center`` (a point of the extended plane) the polar axis is rotated
    onto that point and the polar nodes are graded towards it through
    ``1 - cos(rho) = 2 s^grading``; an integrand behaving like
    ``d(z, center)^g`` then becomes ``s^(grading*(g+2)/2 - 1)`` times a smooth
    function of ``s``.  Without a centre the axis is the south pole and no
    grading is applied, so spherical polynomials of degree below
    ``resolution`` are integrated exactly.
    """
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    n_u, n_phi = resolution, 2 * resolution
    t, wt = leggauss(n_u)
    s, ws = (t + 1) / 2, wt / 2
    pole = 0j if center is None else complex(center)
    k = 1 if center is None else (4 if grading is None else int(grading))
    x = 2.0 * s**k
    dx = 2.0 * k * s ** (k - 1) * ws
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    X, P = np.meshgrid(x, phi, indexing="ij")
    W = np.outer(dx, np.full(n_phi, 2 * math.pi / n_phi)) / 4.0
    z = local_polar_points(pole, X.ravel(), P.ravel())
    singular = () if center is None else (pole,)
    return SphereGrid(z=z, weights=W.ravel(), singular=singular, resolution=resolution)
