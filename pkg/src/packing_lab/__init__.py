"""Packing numbers, Weyl norms and elliptic-function tools on the sphere and flat tori."""
from .elliptic import (
    Lattice,
    DegenerateLatticeError,
    normalize_lattice,
    square_lattice,
    hexagonal_lattice,
    half_period_zeta,
    sigma,
    sigma_star,
    weyl_translate,
)
from .optimize import OptimSpec, PackingResult, minimize_configuration
from .pseudopoly import Pseudopolynomial, fiber_residuals, pi_alpha, pseudo_eval, pseudo_Lbeta_norm
from .quadrature import QuadSpec, QuadResult, TorusGrid, integrate_adaptive
from .sphere import (
    INF,
    DivergentIntegralError,
    SphereGrid,
    build_sphere_grid,
    green_sphere,
    sphere_distance,
    sphere_moment,
    stereo_lift,
    stereo_project,
)
from .sphere_packing import (
    coalesced_value,
    estimate_theta,
    packing_integral,
    packing_integral_beta2,
    rho_zero_packing,
    spiral_configuration,
)
from .torus import (
    TorusGreen,
    LatticeRefinement,
    bipolar_green,
    compute_A_Lambda,
    estimate_torus_theta,
    green_torus,
    make_torus_green,
    refine_lattice,
    renormalized_lattice,
    torus_moment,
    torus_packing_integral,
    torus_theta_at_lattice,
    verify_superposition,
)
from .weyl import (
    WeylPolynomial,
    bombieri_bounds,
    condition_number,
    log_energy,
    poly_from_roots,
    theta2_condition_form,
    weyl_norm_sq,
    weyl_norm_sq_integral,
)

__version__ = "0.1.0"
