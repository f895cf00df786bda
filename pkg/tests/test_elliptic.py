import cmath
import math

import numpy as np
import pytest

from packing_lab.elliptic import (
    COVOLUME,
    DegenerateLatticeError,
    half_period_zeta,
    hexagonal_lattice,
    log_abs_sigma_star_periodic,
    normalize_lattice,
    sigma,
    sigma_star,
    square_lattice,
    weyl_translate,
)
from oracles import sigma_mp, sigma_product

LATTICES = [
    square_lattice(),
    hexagonal_lattice(),
    normalize_lattice(1.0, 0.3 + 1.7j),
    normalize_lattice(2 + 1j, -1 + 3j),
]


def test_normalize_examples():
    L = hexagonal_lattice()
    assert abs(L.omega1 * L.omega2.imag - math.pi / 2) < 1e-12
    assert L.omega1 > 0 and L.omega2.imag > 0
    with pytest.raises(DegenerateLatticeError):
        normalize_lattice(1.0, 2.0)


def test_normalize_handles_orientation():
    L = normalize_lattice(1j, 1.0)
    assert abs(L.covolume() - COVOLUME) < 1e-12
    assert L.omega2.imag > 0


@pytest.mark.parametrize("L", LATTICES)
def test_legendre_and_b(L):
    assert L.legendre_residual() < 1e-10
    assert L.b_residual() < 1e-10


def test_square_symmetry():
    L = square_lattice()
    l1, l2 = half_period_zeta(L)
    assert abs(l1.imag) < 1e-12
    assert abs(l2 + 1j * l1) < 1e-10


@pytest.mark.parametrize("L", LATTICES[:3])
def test_sigma_matches_mpmath(L):
    rng = np.random.default_rng(0)
    for z in rng.normal(scale=0.8, size=5) + 1j * rng.normal(scale=0.8, size=5):
        ref = sigma_mp(L.omega1, L.omega2, z)
        assert abs(sigma(L, z) - ref) < 1e-12 * max(1, abs(ref))


def test_sigma_matches_product():
    L = hexagonal_lattice()
    z = np.array([0.1 + 0.2j, -0.7 + 0.4j, 1.1 - 0.3j])
    ref = sigma_product(L.omega1, L.omega2, z)
    assert np.max(np.abs(sigma(L, z) - ref) / np.abs(ref)) < 1e-11


def test_sigma_zeros_and_oddness():
    L = square_lattice()
    assert sigma(L, 0j) == 0
    assert abs(sigma(L, L.omega1 + L.omega2)) < 1e-12
    z = 0.3 + 0.4j
    assert abs(sigma(L, -z) + sigma(L, z)) < 1e-14


@pytest.mark.parametrize("L", LATTICES)
def test_periodic_modulus(L):
    rng = np.random.default_rng(1)
    z = L.point(rng.random(40), rng.random(40))
    h = log_abs_sigma_star_periodic(L, z)
    for w in L.generators:
        assert np.max(np.abs(np.exp(log_abs_sigma_star_periodic(L, z + w)) - np.exp(h))) < 1e-10
    direct = np.log(np.abs(sigma_star(L, z))) - np.abs(z) ** 2
    assert np.max(np.abs(direct - h)) < 1e-10


def test_weyl_translate_preserves_modulus_weight():
    # |T_a f(z)| e^{-|z|^2} = |f(z+a)| e^{-|z+a|^2}
    L = hexagonal_lattice()
    a, z = 0.4 - 0.2j, 0.1 + 0.3j
    f = lambda x: sigma_star(L, x)
    lhs = abs(weyl_translate(a, f, z)) * math.exp(-abs(z) ** 2)
    rhs = abs(f(z + a)) * math.exp(-abs(z + a) ** 2)
    assert abs(lhs / rhs - 1) < 1e-12
    assert weyl_translate(0, f, z) == pytest.approx(f(z), rel=1e-15)


def test_frame_maps_user_generators():
    w1, w2 = 2 + 1j, -1 + 3j
    L = normalize_lattice(w1, w2)
    for w in (w1, w2):
        assert L.contains(L.frame * w)
    assert abs(abs(L.frame) * math.sqrt(abs((np.conj(w1) * w2).imag)) - math.sqrt(math.pi / 2)) < 1e-12
    assert abs(cmath.phase(L.frame * w1)) < 1e-12 or L.contains(L.frame * w1)
