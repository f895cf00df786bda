"""Multi-start Nelder-Mead over point configurations on the sphere or a torus.

Sphere configurations are optimized in plane coordinates.  Before every
simplex segment the configuration is rotated so that the north pole sits in
the largest empty region, which keeps all coordinates bounded; the objective
is assumed rotation invariant.  Torus configurations use lattice coordinates.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .elliptic import Lattice
from .sphere import INF, is_inf, mobius_rotate, sphere_distance

__all__ = ["OptimSpec", "PackingResult", "minimize_configuration", "default_restarts", "worker_count", "recenter"]


def default_restarts(N: int) -> int:
    return 8 + 2 * math.ceil(math.sqrt(N))


def worker_count() -> int:
    """Worker cap from ``PACKING_LAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("PACKING_LAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class OptimSpec:
    restarts: int | None = None  # None: 8 + 2 ceil(sqrt(N))
    max_iters: int = 4000
    rel_improvement_floor: float = 1e-10
    seed: int = 0
    window: int = 50
    segment: int = 400

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class PackingResult:
    value: float
    configuration: np.ndarray
    beta: float | None
    iterations: int
    converged: bool
    restart_values: list
    histories: list = field(default_factory=list, repr=False)
    seed: int = 0
    est_error: float = math.nan


def _fibonacci_candidates(n: int = 256) -> np.ndarray:
    k = np.arange(n) + 0.5
    h = 1 - 2 * k / n  # cos of the polar angle from the north pole
    phi = math.pi * (3 - math.sqrt(5)) * k
    return np.sqrt((1 + h) / (1 - h)) * np.exp(1j * phi)


_CANDIDATES = _fibonacci_candidates()


def recenter(cfg: np.ndarray) -> np.ndarray:
    """Rotate the sphere so that the deepest hole among fixed probes goes to infinity."""
    cfg = np.asarray(cfg, dtype=complex)
    d = sphere_distance(_CANDIDATES[:, None], cfg[None, :]).min(axis=1)
    q = _CANDIDATES[int(np.argmax(d))]
    moved = mobius_rotate(cfg, q)  # q -> 0
    inf = is_inf(moved) | (moved == 0)
    with np.errstate(divide="ignore"):
        out = np.where(inf, np.where(moved == 0, INF, 0j), -1.0 / np.where(inf, 1.0, moved))
    return out  # q -> infinity


def _pack(cfg, domain):
    if domain == "sphere":
        return np.column_stack([cfg.real, cfg.imag]).ravel()
    s, t = domain.coordinates(cfg)
    return np.column_stack([s, t]).ravel()


def _unpack(x, domain):
    x = np.asarray(x).reshape(-1, 2)
    if domain == "sphere":
        return x[:, 0] + 1j * x[:, 1]
    return domain.point(x[:, 0], x[:, 1])


def _initial(N: int, domain, r: int, rng: np.random.Generator, starts) -> np.ndarray:
    if r < len(starts):
        return np.asarray(starts[r], dtype=complex)
    base = np.asarray(starts[0], dtype=complex) if starts else None
    if domain == "sphere":
        if base is not None and r % 2 == 1:
            # random rotation of a good start plus a small perturbation
            c = complex(*rng.normal(size=2))
            z = mobius_rotate(base, c)
            z = np.where(is_inf(z), 1e3 + 0j, z)
            return z * np.exp(rng.normal(scale=0.05, size=N) + 1j * rng.normal(scale=0.05, size=N))
        v = rng.normal(size=(N, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        return (v[:, 0] + 1j * v[:, 1]) / (1 - v[:, 2])
    L: Lattice = domain
    if base is not None and r % 2 == 1:
        s, t = L.coordinates(base)
        return L.point(s + rng.normal(scale=0.05, size=N), t + rng.normal(scale=0.05, size=N))
    return L.point(rng.random(N), rng.random(N))


def _run_restart(objective, N, domain, spec: OptimSpec, start: np.ndarray):
    best = {"f": float(objective(start)), "cfg": start.copy()}
    history = [best["f"]]
    state = {"iters": 0, "converged": False}

    def tracked(x):
        cfg = _unpack(x, domain)
        f = float(objective(cfg))
        if f < best["f"]:
            best["f"], best["cfg"] = f, cfg.copy()
        return f

    def callback(intermediate_result):
        state["iters"] += 1
        history.append(best["f"])
        w = spec.window
        if len(history) > w:
            old, new = history[-w - 1], history[-1]
            if old - new <= spec.rel_improvement_floor * abs(new):
                state["converged"] = True
                raise StopIteration
        if state["iters"] >= spec.max_iters:
            raise StopIteration

    while not state["converged"] and state["iters"] < spec.max_iters:
        cfg = best["cfg"]
        if domain == "sphere" and N > 1:
            cfg = recenter(cfg)
            best["cfg"] = cfg
        x0 = _pack(cfg, domain)
        before = state["iters"]
        minimize(
            tracked,
            x0,
            method="Nelder-Mead",
            callback=callback,
            options={"maxiter": spec.segment, "xatol": 1e-12, "fatol": 0.0, "adaptive": True},
        )
        if state["iters"] == before:
            break
    return best["f"], best["cfg"], state["iters"], state["converged"], history


def minimize_configuration(
    objective, N: int, domain="sphere", spec: OptimSpec = OptimSpec(), starts=(), beta=None
) -> PackingResult:
    """Minimize ``objective(cfg)`` over N-point configurations.

    ``domain`` is ``"sphere"`` or a :class:`Lattice`.  ``starts`` are used
    for the first restarts, the rest are perturbations of ``starts[0]`` and
    uniform random configurations.  Every restart records its best-so-far
    value per simplex iteration, so each history is non-increasing.
    """
    restarts = spec.restarts or default_restarts(N)
    seeds = np.random.SeedSequence(spec.seed).spawn(restarts)

    def one(r):
        rng = np.random.default_rng(seeds[r])
        return _run_restart(objective, N, domain, spec, _initial(N, domain, r, rng, list(starts)))

    workers = min(worker_count(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            runs = list(ex.map(one, range(restarts)))
    else:
        runs = [one(r) for r in range(restarts)]
    values = [r[0] for r in runs]
    k = int(np.argmin(values))
    f, cfg, iters, conv, _ = runs[k]
    return PackingResult(
        value=f,
        configuration=cfg,
        beta=beta,
        iterations=iters,
        converged=conv,
        restart_values=values,
        histories=[r[4] for r in runs],
        seed=spec.seed,
    )
