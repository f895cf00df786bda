import math

import numpy as np

from packing_lab.elliptic import hexagonal_lattice, square_lattice
from packing_lab.pseudopoly import (
    Pseudopolynomial,
    fiber_residuals,
    phase_factor,
    pi_alpha,
    pseudo_eval,
    pseudo_Lbeta_norm,
    root_shift_sign,
)
from packing_lab.torus import green_torus, make_torus_green, torus_moment

L = hexagonal_lattice()
G = make_torus_green(L)
rng = np.random.default_rng(3)


def grid(n=12):
    g = np.linspace(0.04, 0.96, n)
    s, t = np.meshgrid(g, g)
    return L.point(s.ravel(), t.ravel())


def test_modulus_identity():
    for _ in range(50):
        a, z = L.point(*rng.random(2)), L.point(*rng.uniform(-1, 2, 2))
        beta = rng.uniform(0.1, 5)
        lhs = abs(pi_alpha(L, a, z)) ** beta
        rhs = math.exp(beta * (G.A_Lambda + green_torus(G, z, a)))
        assert abs(lhs / rhs - 1) < 1e-9


def test_zeros():
    a = 0.2 + 0.3j
    assert pi_alpha(L, a, a) == 0
    assert abs(pi_alpha(L, a, a + L.omega1 - L.omega2)) < 1e-12


def test_root_shift_law():
    w1, w2 = L.generators
    z = grid(6)
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            a = 0.13 + 0.21j
            shift = k1 * w1 + k2 * w2
            lhs = pi_alpha(L, a + shift, z)
            rhs = root_shift_sign(k1, k2) * np.exp(2j * (np.conj(shift) * a).imag) * pi_alpha(L, a, z)
            assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_shift_sign_table():
    assert root_shift_sign(0, 0) == 1 and root_shift_sign(2, -4) == 1
    assert root_shift_sign(1, 0) == -1 and root_shift_sign(0, 1) == -1 and root_shift_sign(1, 1) == -1


def test_argument_shift_law():
    P = Pseudopolynomial(L, L.point(rng.random(4), rng.random(4)))
    gamma = complex(P.roots.sum())
    z = grid(6)
    for j, w in ((1, L.omega1), (2, L.omega2)):
        assert np.max(np.abs(pseudo_eval(P, z + w) - phase_factor(L, j, gamma, P.N, z) * pseudo_eval(P, z))) < 1e-10


def test_phase_factor_depends_on_class_only():
    z = grid(4)
    for j in (1, 2):
        for w in L.generators:
            assert np.max(np.abs(phase_factor(L, j, 0.3 + w, 3, z) - phase_factor(L, j, 0.3, 3, z))) < 1e-12


def test_single_root_norm():
    for a in (0j, 0.4 + 0.2j):
        v = pseudo_Lbeta_norm(Pseudopolynomial(L, [a]), 1.5)
        assert abs(v / ((math.pi / 2) * math.exp(1.5 * G.A_Lambda) * torus_moment(G, 1.5)) - 1) < 1e-9


def test_sandwich_and_attainment():
    beta = 2.0
    for N in (2, 4, 8):
        scale = (math.pi / 2) * math.exp(N * beta * G.A_Lambda)
        upper = scale * torus_moment(G, beta * N)
        v = pseudo_Lbeta_norm(Pseudopolynomial(L, L.point(rng.random(N), rng.random(N))), beta)
        assert scale <= v <= upper * (1 + 1e-9)
        coal = pseudo_Lbeta_norm(Pseudopolynomial(L, [0.1j] * N), beta)
        assert abs(coal / upper - 1) < 1e-6


def test_fiber_member():
    P = Pseudopolynomial(L, [0.1 + 0.1j, -0.3j])
    gamma = complex(P.roots.sum()) + L.omega1
    res = [fiber_residuals(P, gamma, grid(), h) for h in (1e-3, 5e-4, 2.5e-4, 1.25e-4)]
    for a, b in zip(res, res[1:]):
        assert 3.5 < a.pde_residual / b.pde_residual < 4.5
    assert max(r.periodicity_residual for r in res) < 1e-10


def test_fiber_non_member():
    P = Pseudopolynomial(L, [0.1 + 0.1j, -0.3j])
    r = fiber_residuals(P, complex(P.roots.sum()) + 0.1, grid())
    assert r.periodicity_residual > 0.01


def test_fiber_single_root_constant():
    P = Pseudopolynomial(square_lattice(), [0j])
    C = [fiber_residuals(P, 0j, grid(), h).pde_residual / h**2 for h in (1e-3, 5e-4, 2.5e-4)]
    assert max(C) / min(C) < 1.2
