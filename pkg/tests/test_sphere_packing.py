import math

import numpy as np
import pytest

from packing_lab.oracles import mc_sphere_packing
from packing_lab.optimize import OptimSpec
from packing_lab.sphere import INF, DivergentIntegralError, build_sphere_grid, sphere_distance, sphere_moment
from packing_lab.sphere_packing import (
    coalesced_value,
    covering_radius,
    estimate_theta,
    exact_grid_resolution,
    packing_integral,
    packing_integral_beta2,
    rho_zero_packing,
    spiral_configuration,
)

rng = np.random.default_rng(11)

# {0, inf} at beta = 2 equals e^2/6
ANTIPODAL_BETA2 = 1.2315093498217748


def test_antipodal_value():
    assert abs(packing_integral([0, INF], 2.0) - ANTIPODAL_BETA2) < 1e-12
    assert abs(packing_integral_beta2([0, INF]) - ANTIPODAL_BETA2) < 1e-12


def test_antipodal_monte_carlo():
    m, se = mc_sphere_packing([0, INF], 2.0, n=2 * 10**6, seed=3)
    assert abs(m - ANTIPODAL_BETA2) <= 3 * se


def test_beta2_closed_form():
    for N in (1, 2, 5, 9):
        cfg = list(rng.normal(size=N) + 1j * rng.normal(size=N))
        if N > 2:
            cfg[0] = INF
        assert abs(packing_integral(cfg, 2.0) / packing_integral_beta2(cfg) - 1) < 1e-9


def test_trivial_cases():
    assert packing_integral([1, 2, 3], 0.0) == 1.0
    with pytest.raises(DivergentIntegralError):
        packing_integral([0, 1], -1.0)


def test_coalesced():
    for N, beta in ((3, 1.0), (5, 0.4), (2, -0.6)):
        assert abs(packing_integral([0.5j] * N, beta) / coalesced_value(N, beta) - 1) < 1e-10


def test_bounds():
    for _ in range(10):
        N = int(rng.integers(1, 7))
        beta = rng.uniform(0.2, 3)
        v = packing_integral(rng.normal(size=N) + 1j * rng.normal(size=N), beta)
        assert 1 - 1e-9 <= v <= coalesced_value(N, beta) + 1e-9


def test_exact_product_grid():
    assert exact_grid_resolution(3, 4.0) == 5
    assert exact_grid_resolution(3, 3.0) is None
    cfg = rng.normal(size=3) + 1j * rng.normal(size=3)
    g = build_sphere_grid(exact_grid_resolution(3, 4.0))
    assert abs(packing_integral(cfg, 4.0, grid=g) / packing_integral(cfg, 4.0) - 1) < 1e-12


def test_rho_single_point():
    r = rho_zero_packing([0.3 - 0.2j], 2.0)
    m1, m2 = sphere_moment(2) / math.e, sphere_moment(4) / math.e**2
    assert abs(r.rho - (1 - m1 * m1 / m2)) < 1e-12
    assert abs(r.rho - 0.25) < 1e-12


def test_rho_positive_and_hoelder():
    for beta in (0.5, 1.0, 2.0):
        cfg = rng.normal(size=3) + 1j * rng.normal(size=3)
        r = rho_zero_packing(cfg, beta)
        assert 0 < r.rho < 1
        t1, t2 = packing_integral(cfg, beta), packing_integral(cfg, 2 * beta)
        assert t1**2 <= (1 - r.rho) * t2 * (1 + 1e-12)


def test_spiral():
    assert np.array_equal(spiral_configuration(1), [0j])
    z = spiral_configuration(2)
    assert abs(sphere_distance(z[0], z[1]) - 1) < 1e-6
    assert np.array_equal(spiral_configuration(30), spiral_configuration(30))
    assert covering_radius(spiral_configuration(100)) <= 3 / math.sqrt(100)


def test_estimate_theta_bounds():
    r = estimate_theta(6, 2.0, OptimSpec(restarts=2, max_iters=800))
    assert 1 <= r.value <= packing_integral_beta2(spiral_configuration(6)) + 1e-12
    assert r.value <= coalesced_value(6, 2.0)
    assert r.est_error < 1e-9 * r.value


def test_estimate_theta_other_beta():
    r = estimate_theta(3, 4.0, OptimSpec(restarts=2, max_iters=400))
    assert 1 <= r.value <= coalesced_value(3, 4.0)
    with pytest.raises(ValueError):
        estimate_theta(0, 2.0)
