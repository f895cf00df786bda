import math

import numpy as np
import pytest

from packing_lab.elliptic import hexagonal_lattice
from packing_lab.optimize import OptimSpec, default_restarts, minimize_configuration, recenter, worker_count
from packing_lab.sphere import sphere_distance, sphere_moment
from packing_lab.sphere_packing import estimate_theta, packing_integral_beta2, spiral_configuration
from packing_lab.torus import estimate_torus_theta, make_torus_green, refine_lattice, torus_packing_integral
from packing_lab.quadrature import QuadSpec

SMALL = OptimSpec(restarts=3, max_iters=300, seed=7)


def test_default_restarts():
    assert default_restarts(1) == 10
    assert default_restarts(16) == 16
    with pytest.raises(ValueError):
        OptimSpec(restarts=0)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("PACKING_LAB_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("PACKING_LAB_THREADS", "junk")
    assert worker_count() == 1


def test_deterministic():
    a = estimate_theta(4, 2.0, SMALL)
    b = estimate_theta(4, 2.0, SMALL)
    assert a.value == b.value
    assert np.array_equal(a.configuration, b.configuration)
    assert a.restart_values == b.restart_values


def test_independent_of_thread_count(monkeypatch):
    a = estimate_theta(4, 2.0, SMALL)
    monkeypatch.setenv("PACKING_LAB_THREADS", "3")
    b = estimate_theta(4, 2.0, SMALL)
    assert a.restart_values == b.restart_values
    assert np.array_equal(a.configuration, b.configuration)


def test_histories_monotone():
    r = estimate_theta(5, 2.0, SMALL)
    for h in r.histories:
        assert all(y <= x for x, y in zip(h, h[1:]))


def test_single_point_constant():
    r = minimize_configuration(packing_integral_beta2, 1, "sphere", OptimSpec(restarts=4, max_iters=100))
    assert all(abs(v - sphere_moment(2.0)) < 1e-9 for v in r.restart_values)


def test_two_points_become_antipodal():
    r = estimate_theta(2, 2.0, OptimSpec(restarts=4))
    assert abs(sphere_distance(r.configuration[0], r.configuration[1]) - 1) < 1e-4


def test_recenter_keeps_objective():
    cfg = spiral_configuration(7)
    cfg[-1] = 0.3 + 0.1j  # make all points finite
    assert abs(packing_integral_beta2(recenter(cfg)) - packing_integral_beta2(cfg)) < 1e-12


def test_torus_descent_from_cosets():
    G = make_torus_green(hexagonal_lattice())
    start = torus_packing_integral(G, refine_lattice(G.lattice, 3).cosets, 2.0)
    r = estimate_torus_theta(G, 3, 2.0, OptimSpec(restarts=1, max_iters=100))
    assert r.value <= start * (1 + 1e-9)


def test_generic_objective_on_torus():
    L = hexagonal_lattice()
    G = make_torus_green(L)
    coarse = QuadSpec(base_resolution=16, refinement_depth=0)
    obj = lambda cfg: torus_packing_integral(G, cfg, 1.0, quad_spec=coarse)
    r = minimize_configuration(obj, 2, L, OptimSpec(restarts=2, max_iters=60, seed=1))
    assert len(r.configuration) == 2 and r.value >= 1 - 1e-9
    assert len(r.restart_values) == 2
