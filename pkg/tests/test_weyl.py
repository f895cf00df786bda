import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packing_lab.sphere import INF, build_sphere_grid
from packing_lab.sphere_packing import packing_integral
from packing_lab.weyl import (
    NotARootError,
    ResolutionError,
    UnsupportedRootError,
    WeylPolynomial,
    bombieri_bounds,
    condition_number,
    log_energy,
    log_energy_plane,
    poly_from_roots,
    theta2_condition_form,
    weyl_norm_sq,
    weyl_norm_sq_integral,
)
from oracles import binom_weyl_norm_mp, poly_from_roots_mp

cplx = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


def rand_poly(rng, n):
    return WeylPolynomial(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1), n)


def test_constant_norm():
    assert weyl_norm_sq(WeylPolynomial.from_coeffs([1.0])) == 1.0


def test_cube_norm():
    assert abs(weyl_norm_sq(poly_from_roots([1, 1, 1])) - 8) < 1e-12


@given(cplx, st.integers(0, 30))
@settings(max_examples=60)
def test_power_norm(a, N):
    Q = WeylPolynomial.from_coeffs(poly_from_roots([a] * N).coeffs if N else [1.0])
    assert abs(weyl_norm_sq(Q) / (1 + abs(a) ** 2) ** N - 1) < 1e-10


def test_norm_matches_extended_precision():
    rng = np.random.default_rng(4)
    for n in (3, 10, 25):
        Q = rand_poly(rng, n)
        assert abs(weyl_norm_sq(Q) / binom_weyl_norm_mp(Q.coeffs) - 1) < 1e-13


def test_integral_matches_coefficients():
    rng = np.random.default_rng(5)
    for n in (0, 1, 10, 20):
        Q = rand_poly(rng, n)
        grid = build_sphere_grid(max(n + 1, 4))
        assert abs(weyl_norm_sq_integral(Q, grid) / weyl_norm_sq(Q) - 1) < 1e-7


def test_integral_refuses_coarse_grid():
    with pytest.raises(ResolutionError):
        weyl_norm_sq_integral(rand_poly(np.random.default_rng(0), 10), build_sphere_grid(8))


def test_roots_examples():
    assert np.allclose(poly_from_roots([1, -1]).coeffs, [-1, 0, 1])
    assert np.allclose(poly_from_roots([0] * 5).coeffs, [0, 0, 0, 0, 0, 1])
    with pytest.raises(UnsupportedRootError):
        poly_from_roots([0, INF])


def test_roots_vs_extended_precision():
    rng = np.random.default_rng(8)
    r = rng.normal(size=8) + 1j * rng.normal(size=8)
    P = poly_from_roots(r)
    assert np.max(np.abs(P.coeffs - poly_from_roots_mp(r))) < 1e-10
    assert np.max(np.abs(P(r))) < 1e-9 * np.max(np.abs(P.coeffs))


def test_bombieri_lower_attained_by_monomial():
    for n1 in range(1, 6):
        r = bombieri_bounds(WeylPolynomial.from_coeffs([0] * n1 + [1]), WeylPolynomial.from_coeffs([1.0]))
        assert r.ratio == r.lower == 1.0  # N2 = 0, so N1! N2!/N! = 1


def test_bombieri_upper_attained_by_equal_roots():
    a = 0.3 - 0.7j
    r = bombieri_bounds(poly_from_roots([a] * 2), poly_from_roots([a] * 3))
    assert abs(r.ratio - 1) < 1e-12


def test_bombieri_antipodal():
    r = bombieri_bounds(poly_from_roots([1, 1]), poly_from_roots([-1, -1]))
    assert abs(r.ratio - 1 / 6) < 1e-10


def test_bombieri_random_pairs():
    rng = np.random.default_rng(3)
    for _ in range(200):
        r = bombieri_bounds(rand_poly(rng, int(rng.integers(0, 8))), rand_poly(rng, int(rng.integers(0, 8))))
        assert r.holds


def test_condition_numbers():
    assert abs(condition_number(WeylPolynomial.from_coeffs([-1, 0, 1]), 1.0) - 1) < 1e-15
    assert condition_number(WeylPolynomial.from_coeffs([0, 0, 1]), 0.0) == math.inf
    v = condition_number(WeylPolynomial.from_coeffs([-1, 0, 0, 0, 1]), 1j)
    assert abs(v - math.sqrt(2)) < 1e-14
    with pytest.raises(NotARootError):
        condition_number(WeylPolynomial.from_coeffs([-1, 0, 1]), 0.5)


def test_log_energy_examples():
    assert abs(log_energy([1, -1])) < 1e-15
    assert abs(log_energy([0, INF])) < 1e-15
    assert log_energy([1, 1]) == math.inf
    rng = np.random.default_rng(1)
    w = rng.normal(size=6) + 1j * rng.normal(size=6)
    assert abs(log_energy(w) - log_energy_plane(w)) < 1e-10


def test_theta2_form():
    assert abs(theta2_condition_form([1, -1]) / packing_integral([1, -1], 2.0) - 1) < 1e-6
    assert abs(theta2_condition_form([0]) / (math.e / 2) - 1) < 1e-6
    assert theta2_condition_form([0.5, 0.5, 1]) == math.inf


def test_energy_condition_identity():
    # exp(-(2/N) E) prod mu^(2/N) = N |P|^2 / prod (1+|w|^2)
    rng = np.random.default_rng(2)
    for N in range(2, 13):
        w = rng.normal(size=N) + 1j * rng.normal(size=N)
        P = poly_from_roots(w)
        lhs = math.exp(-2 * log_energy(w) / N) * np.prod([condition_number(P, z) for z in w]) ** (2 / N)
        rhs = N * weyl_norm_sq(P) / np.prod(1 + np.abs(w) ** 2)
        assert abs(lhs / rhs - 1) < 1e-9
