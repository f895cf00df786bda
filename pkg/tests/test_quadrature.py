import math

import numpy as np
import pytest

from packing_lab.elliptic import hexagonal_lattice, square_lattice
from packing_lab.quadrature import (
    QuadSpec,
    disc_grid,
    grading_for,
    group_points,
    integrate_adaptive,
    log_disc_integral,
    sphere_cell_grid,
    torus_cell_grid,
)
from packing_lab.sphere import INF, green_sphere, sphere_distance, sphere_moment
from packing_lab.sphere_packing import packing_integral


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadSpec(base_resolution=8)
    with pytest.raises(ValueError):
        QuadSpec(target_rel_tol=1e-14)


def test_constant_on_sphere():
    r = integrate_adaptive(lambda z: np.ones(len(z)), "sphere")
    assert abs(r.value - math.pi) < 1e-12
    assert r.est_error < 1e-12 and r.converged


def test_constant_on_torus():
    r = integrate_adaptive(lambda z: np.ones(len(z)), hexagonal_lattice(), singular=[0j, 0.3 + 0.1j])
    assert abs(r.value - math.pi / 2) < 1e-12


def test_moment_on_sphere():
    r = integrate_adaptive(lambda z: np.exp(2 * green_sphere(z, 0j)), "sphere", singular=[0j], exponents=[2.0])
    assert abs(r.value - math.pi * math.e / 2) < 1e-10 * math.pi


@pytest.mark.parametrize("pts", [[0j], [0j, INF], [1, 1.001], [0.2j, -3, 5 + 5j, INF]])
def test_cell_weights_sum_to_area(pts):
    g = sphere_cell_grid(pts, resolution=24)
    assert abs(g.weights.sum() - math.pi) < 1e-12
    # every node lies in the cell of its own centre
    own = np.array(pts, dtype=complex)[g.cell_ids]
    d_own = sphere_distance(g.z, own)
    d_all = np.min([sphere_distance(g.z, p) for p in pts], axis=0)
    assert np.all(d_own <= d_all + 1e-12)


def test_torus_cell_weights():
    L = square_lattice()
    g = torus_cell_grid(L, [0j, 0.5, 0.2 + 0.7j], resolution=24)
    assert abs(g.weights.sum() - math.pi / 2) < 1e-12
    assert np.allclose(np.exp(g.log_dist), np.abs(g.offset), rtol=1e-13)


def test_log_distance_is_exact_near_centre():
    g = sphere_cell_grid([3 + 4j], exponents=[-1.7], resolution=32)
    assert np.all(np.isfinite(g.log_dist))
    assert g.log_dist.min() < -30  # far below what the plane coordinates resolve


def test_grading():
    assert grading_for(None) == 2
    assert grading_for(2.0) == 2
    assert grading_for(-1.5) == 4
    assert grading_for(0.3) == 6
    with pytest.raises(ValueError):
        grading_for(-2.0)


def test_log_disc_closed_form():
    for r0 in (0.05, 1.0, 2.5):
        z, w = disc_grid(r0, 48, grading=6)
        ref = 2 * math.pi * (r0**2 / 2) * (math.log(r0) - 0.5)
        assert abs(log_disc_integral(r0) - ref) < 1e-12
        # graded polar rule: r log r becomes smooth in s
        assert abs(np.sum(w * np.log(np.abs(z))) - ref) < 1e-12 * max(1, r0**2)


def test_group_points():
    pts, mult = group_points([1, 2, 1, 1], lambda a, b: abs(a - b))
    assert pts == [1, 2] and list(mult) == [3, 1]


def test_error_estimate_is_honest():
    # closed-form moments with random exponent and pole
    rng = np.random.default_rng(20)
    hits = 0
    for _ in range(200):
        a = rng.uniform(-1.9, 10)
        w = complex(*rng.normal(scale=2, size=2))
        r = packing_integral([w], a, full=True)
        hits += abs(r.value - sphere_moment(a)) <= 3 * r.est_error
    assert hits >= 190


def test_non_convergence_is_flagged():
    spec = QuadSpec(base_resolution=16, refinement_depth=1, target_rel_tol=1e-12)
    r = integrate_adaptive(lambda z: np.abs(np.real(z)) ** 0.5, "sphere", spec)  # kink along a meridian
    assert not r.converged
    assert math.isfinite(r.value) and r.est_error > 0
