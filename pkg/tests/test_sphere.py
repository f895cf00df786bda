import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packing_lab.sphere import (
    INF,
    DivergentIntegralError,
    build_sphere_grid,
    green_sphere,
    mobius_rotate,
    sphere_distance,
    sphere_moment,
    stereo_lift,
    stereo_project,
)
from oracles import uniform_sphere

coord = st.floats(-50, 50, allow_nan=False)
points = st.builds(complex, coord, coord)


def test_lift_of_zero_and_infinity():
    assert np.allclose(stereo_lift(0j), [0, 0, 0])
    assert np.allclose(stereo_lift(INF), [0, 0, 1])
    assert stereo_project(np.array([0.0, 0.0, 1.0])) == INF


@given(points)
def test_lift_project_round_trip(z):
    p = stereo_lift(z)
    assert abs(np.linalg.norm(p - [0, 0, 0.5]) - 0.5) < 1e-12
    assert abs(stereo_project(p) - z) <= 1e-9 * (1 + abs(z) ** 2)


def test_project_uniform_points_round_trip():
    p = uniform_sphere(200, np.random.default_rng(0))
    assert np.allclose(stereo_lift(stereo_project(p)), p, atol=1e-12)


@given(points, points)
def test_distance_is_symmetric_and_bounded(z, w):
    d = sphere_distance(z, w)
    assert 0 <= d <= 1
    assert abs(d - sphere_distance(w, z)) < 1e-15


@given(points)
def test_antipode_at_distance_one(z):
    if abs(z) < 1e-6:
        return
    assert abs(sphere_distance(z, -1 / np.conj(z)) - 1) < 1e-12


def test_distance_to_infinity():
    assert sphere_distance(0j, INF) == 1.0
    assert abs(sphere_distance(1.0, INF) - 1 / math.sqrt(2)) < 1e-15


@given(points, points, points)
@settings(max_examples=50)
def test_rotation_preserves_distance(z, w, c):
    z2, w2 = mobius_rotate(np.array([z, w]), c)
    assert abs(sphere_distance(z2, w2) - sphere_distance(z, w)) < 1e-9


def test_green_values():
    assert green_sphere(0j, INF) == 0.5
    assert green_sphere(1 + 1j, 1 + 1j) == -math.inf
    assert abs(green_sphere(1.0, 0j) - (0.5 + math.log(1 / math.sqrt(2)))) < 1e-15


def test_moment_closed_form():
    assert sphere_moment(0.0) == 1.0
    assert abs(sphere_moment(2.0) - math.e / 2) < 1e-15
    with pytest.raises(DivergentIntegralError):
        sphere_moment(-2.0)


def test_grid_total_mass():
    for res in (4, 16, 64):
        g = build_sphere_grid(res)
        assert abs(g.integrate(np.ones(len(g.z))) - math.pi) < 1e-12


def test_grid_moment_at_128():
    g = build_sphere_grid(128)
    v = g.integrate(np.exp(2 * green_sphere(g.z, 0j))) / math.pi
    assert abs(v - math.e / 2) < 1e-8


def test_grid_moment_off_pole():
    # exp(10 U) is a polynomial of degree 5 in the ambient coordinates
    w = 3 + 4j
    g = build_sphere_grid(64)
    v = g.integrate(np.exp(10 * green_sphere(g.z, w))) / math.pi
    assert abs(v - sphere_moment(10)) < 1e-8 * sphere_moment(10)


def test_grid_rejects_tiny_resolution():
    with pytest.raises(ValueError):
        build_sphere_grid(2)
