"""Command-line interface.

Every subcommand prints one JSON document (or a CSV table for sweeps).  The
JSON carries the parsed inputs under ``"inputs"``, so a saved result can be
fed back with ``--json-input FILE`` to recompute and compare it.

Exit codes: 0 success, 1 unknown subcommand, 2 invalid input, 3 numerical
non-convergence, failed round trip or failed report.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .elliptic import hexagonal_lattice, normalize_lattice, sigma, sigma_star, square_lattice
from .optimize import OptimSpec
from .pseudopoly import Pseudopolynomial, fiber_residuals, pseudo_Lbeta_norm
from .sphere import INF, build_sphere_grid, sphere_moment
from .sphere_packing import estimate_theta, packing_integral, rho_zero_packing
from .torus import (
    bipolar_green,
    coset_count,
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
from .weyl import WeylPolynomial, bombieri_bounds, poly_from_roots, weyl_norm_sq, weyl_norm_sq_integral

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
ROUND_TRIP_TOL = 1e-12


class InputError(ValueError):
    pass


class NotConverged(Exception):
    def __init__(self, payload):
        super().__init__("not converged")
        self.payload = payload


# ---- parsing helpers

def parse_complex(text: str) -> complex:
    t = str(text).strip().replace(" ", "")
    if t.lower() in ("inf", "infinity", "+inf"):
        return INF
    t = t.replace("i", "j")
    try:
        z = complex(t)
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a complex number") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{text!r} is not finite (write 'inf' for the point at infinity)")
    return z


def parse_complex_list(text: str) -> list[complex]:
    if text is None or str(text).strip() == "":
        return []
    return [parse_complex(p) for p in str(text).split(",")]


def parse_float_list(text: str) -> list[float]:
    out = []
    for p in str(text).split(","):
        try:
            x = float(p)
        except ValueError:
            raise InputError(f"cannot parse {p!r} as a number") from None
        if not math.isfinite(x):
            raise InputError(f"{p!r} is not finite")
        out.append(x)
    return out


def parse_int_list(text: str) -> list[int]:
    out = []
    for p in str(text).split(","):
        p = p.strip()
        if "-" in p[1:]:
            lo, hi = p.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(p))
    return out


def _finite(x: float, name: str) -> float:
    if x is None:
        raise InputError(f"--{name} is required")
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"{name} must be finite")
    return x


def _positive_n(n: int) -> int:
    if n < 1:
        raise InputError("N must be >= 1")
    return n


def _no_inf(roots, name):
    if any(not math.isfinite(abs(r)) for r in roots):
        raise InputError(f"{name}: a root at infinity is not allowed here")
    return roots


def lattice_from_args(args):
    if args.w1 is not None or args.w2 is not None:
        if args.w1 is None or args.w2 is None:
            raise InputError("give both --w1 and --w2")
        w1, w2 = parse_complex(args.w1), parse_complex(args.w2)
        if not (math.isfinite(abs(w1)) and math.isfinite(abs(w2))):
            raise InputError("lattice generators must be finite")
        return normalize_lattice(w1, w2)
    if args.lattice == "square":
        return square_lattice()
    if args.lattice == "hexagonal":
        return hexagonal_lattice()
    raise InputError(f"unknown lattice {args.lattice!r}")


def optim_spec(args) -> OptimSpec:
    return OptimSpec(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)


# ---- JSON

def to_jsonable(x):
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return "inf"
        return {"re": z.real, "im": z.imag}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _numbers(x, path=""):
    """Flatten a JSON document to {path: float} for comparison."""
    out = {}
    if isinstance(x, dict):
        if set(x) == {"re", "im"}:
            out[path + ".re"], out[path + ".im"] = float(x["re"]), float(x["im"])
        else:
            for k, v in x.items():
                if k not in ("inputs", "round_trip", "seconds"):
                    out.update(_numbers(v, f"{path}.{k}"))
    elif isinstance(x, list):
        for i, v in enumerate(x):
            out.update(_numbers(v, f"{path}[{i}]"))
    elif isinstance(x, bool):
        out[path] = float(x)
    elif isinstance(x, (int, float)):
        out[path] = float(x)
    elif x in ("inf", "-inf", "nan"):
        out[path] = float(x)
    return out


def compare_documents(old: dict, new: dict) -> tuple[bool, float]:
    a, b = _numbers(old), _numbers(new)
    if set(a) != set(b):
        return False, math.inf
    worst = 0.0
    for k in a:
        x, y = a[k], b[k]
        if x == y or (math.isnan(x) and math.isnan(y)):
            continue
        worst = max(worst, abs(x - y) / max(1.0, abs(x)))
    return worst <= ROUND_TRIP_TOL, worst


# ---- subcommands; each returns a JSON-able dict

def cmd_sphere_moment(args):
    a = _finite(args.alpha, "alpha")
    return {"alpha": a, "value": sphere_moment(a)}


def _weyl_poly(coeffs, roots, degree, label):
    if coeffs is not None and roots is not None:
        raise InputError(f"{label}: give coefficients or roots, not both")
    if coeffs is not None:
        c = parse_complex_list(coeffs)
        _no_inf(c, label)
        if not c:
            raise InputError(f"{label}: empty coefficient list")
        return WeylPolynomial.from_coeffs(c, degree)
    if roots is not None:
        r = _no_inf(parse_complex_list(roots), label)
        P = poly_from_roots(r) if r else WeylPolynomial.from_coeffs([1.0])
        return WeylPolynomial.from_coeffs(P.coeffs, degree)
    raise InputError(f"{label}: give --coeffs or --roots")


def cmd_weyl_norm(args):
    Q = _weyl_poly(args.coeffs, args.roots, args.degree, "polynomial")
    out = {"degree": Q.degree, "coefficients": Q.coeffs, "value": weyl_norm_sq(Q)}
    if args.integral_resolution is not None:
        out["integral_value"] = weyl_norm_sq_integral(Q, build_sphere_grid(args.integral_resolution))
    return out


def cmd_bombieri(args):
    Q1 = _weyl_poly(args.q1_coeffs, args.q1_roots, None, "Q1")
    Q2 = _weyl_poly(args.q2_coeffs, args.q2_roots, None, "Q2")
    r = bombieri_bounds(Q1, Q2)
    return {
        "N1": Q1.degree,
        "N2": Q2.degree,
        "ratio": r.ratio,
        "lower": r.lower,
        "upper": r.upper,
        "lower_margin": r.lower_margin,
        "upper_margin": r.upper_margin,
        "holds": r.holds,
    }


def _packing_result(r, extra=None):
    out = {
        "N": len(r.configuration),
        "beta": r.beta,
        "value": r.value,
        "est_error": r.est_error,
        "converged": r.converged,
        "iterations": r.iterations,
        "configuration": r.configuration,
        "restart_values": r.restart_values,
        "seed": r.seed,
    }
    out.update(extra or {})
    return out


def _sweep(args, run_one):
    ns = [_positive_n(n) for n in parse_int_list(args.n)]
    betas = parse_float_list(args.beta)
    for b in betas:
        if b <= 0:
            raise InputError("beta must be positive")
    rows = []
    for n in ns:
        for b in betas:
            rows.append(run_one(n, b))
    return rows


def cmd_sphere_pack(args):
    if args.cfg is not None:
        cfg = parse_complex_list(args.cfg)
        beta = _finite(float(args.beta), "beta")
        r = packing_integral(cfg, beta, full=True)
        out = {"N": len(cfg), "beta": beta, "configuration": cfg, "value": r.value,
               "est_error": r.est_error, "converged": r.converged}
        return out
    rows = _sweep(args, lambda n, b: _packing_result(estimate_theta(n, b, optim_spec(args))))
    return rows[0] if len(rows) == 1 else {"rows": rows, "seed": args.seed}


def cmd_rho_pack(args):
    if not args.cfg:
        raise InputError("--cfg is required")
    cfg = parse_complex_list(args.cfg)
    if not cfg:
        raise InputError("--cfg is empty")
    beta = _finite(args.beta, "beta")
    if beta <= 0:
        raise InputError("beta must be positive")
    r = rho_zero_packing(cfg, beta)
    return {"N": len(cfg), "beta": beta, "rho": r.rho, "a_opt": r.a_opt, "m1": r.m1, "m2": r.m2}


def cmd_sigma_eval(args):
    L = lattice_from_args(args)
    z = _no_inf(parse_complex_list(args.z), "--z")
    return {
        "omega1": L.omega1,
        "omega2": L.omega2,
        "z": z,
        "sigma": [complex(sigma(L, x)) for x in z],
        "sigma_star": [complex(sigma_star(L, x)) for x in z],
    }


def _lattice_doc(L):
    return {
        "omega1": L.omega1,
        "omega2": L.omega2,
        "lambda1": L.lambda1,
        "lambda2": L.lambda2,
        "b": L.b,
        "frame": L.frame,
        "covolume": L.covolume(),
        "legendre_residual": L.legendre_residual(),
    }


def cmd_lattice_normalize(args):
    if args.w1 is None or args.w2 is None:
        raise InputError("give --w1 and --w2")
    return _lattice_doc(lattice_from_args(args))


def cmd_torus_green(args):
    L = lattice_from_args(args)
    G = make_torus_green(L)
    z = _no_inf(parse_complex_list(args.z), "--z")
    w = parse_complex(args.w)
    _no_inf([w], "--w")
    out = {"A_Lambda": G.A_Lambda, "z": z, "w": w, "value": [float(green_torus(G, x, w)) for x in z]}
    if args.wprime is not None:
        wp = parse_complex(args.wprime)
        _no_inf([wp], "--wprime")
        out["wprime"] = wp
        out["bipolar"] = [float(bipolar_green(G, x, w, wp)) for x in z]
    return out


def cmd_torus_moment(args):
    L = lattice_from_args(args)
    G = make_torus_green(L)
    beta = _finite(args.beta, "beta")
    pole = parse_complex(args.pole)
    _no_inf([pole], "--pole")
    r = torus_moment(G, beta, pole=pole, full=True)
    return {"beta": beta, "pole": pole, "A_Lambda": G.A_Lambda, "value": r.value,
            "est_error": r.est_error, "converged": r.converged}


def cmd_torus_pack(args):
    L = lattice_from_args(args)
    G = make_torus_green(L)
    if args.cfg is not None:
        cfg = _no_inf(parse_complex_list(args.cfg), "--cfg")
        beta = _finite(float(args.beta), "beta")
        r = torus_packing_integral(G, cfg, beta, full=True)
        return {"N": len(cfg), "beta": beta, "configuration": cfg, "value": r.value,
                "est_error": r.est_error, "converged": r.converged}
    if args.cosets:
        def one(n, b):
            r = torus_theta_at_lattice(G, n, b)
            return {"N": n, "beta": b, "value": r.value, "renormalized_value": r.renormalized_value,
                    "rel_diff": r.rel_diff, "est_error": r.est_error, "converged": r.converged, "seed": args.seed}
    else:
        def one(n, b):
            return _packing_result(estimate_torus_theta(G, n, b, optim_spec(args)))
    rows = _sweep(args, one)
    return rows[0] if len(rows) == 1 else {"rows": rows, "seed": args.seed}


def cmd_refine_lattice(args):
    L = lattice_from_args(args)
    N = _positive_n(args.n)
    R = refine_lattice(L, N)
    out = {
        "N": N,
        "a_N": R.a_N,
        "b_N": R.b_N,
        "omega1N": R.omega1N,
        "omega2N": R.omega2N,
        "coset_count": coset_count(R),
        "cosets": R.cosets,
    }
    if args.renormalized:
        out["renormalized"] = _lattice_doc(renormalized_lattice(R))
    return out


def cmd_verify_superposition(args):
    L = lattice_from_args(args)
    N = _positive_n(args.n)
    G = make_torus_green(L)
    err = verify_superposition(G, refine_lattice(L, N))
    return {"N": N, "max_abs_error": err, "grid": 64}


def _pseudo(args):
    L = lattice_from_args(args)
    roots = _no_inf(parse_complex_list(args.roots), "--roots")
    if not roots:
        raise InputError("--roots is empty")
    return L, Pseudopolynomial(L, np.array(roots))


def cmd_pseudo_norm(args):
    L, P = _pseudo(args)
    beta = _finite(args.beta, "beta")
    if beta <= 0:
        raise InputError("beta must be positive")
    G = make_torus_green(L)
    N = P.N
    value = pseudo_Lbeta_norm(P, beta)
    scale = (math.pi / 2) * math.exp(N * beta * G.A_Lambda)
    return {"N": N, "beta": beta, "value": value, "lower_bound": scale,
            "upper_bound": scale * torus_moment(G, beta * N)}


def cmd_fiber_check(args):
    L, P = _pseudo(args)
    gamma = parse_complex(args.gamma) if args.gamma is not None else complex(np.sum(P.roots))
    _no_inf([gamma], "--gamma")
    n = args.grid
    g = (np.arange(n) + 0.5) / n
    s, t = np.meshgrid(g, g, indexing="ij")
    z = L.point(s.ravel(), t.ravel())
    r = fiber_residuals(P, gamma, z, args.h)
    return {"N": P.N, "gamma": gamma, "h": r.h, "pde_residual": r.pde_residual,
            "periodicity_residual": r.periodicity_residual,
            "member": bool(L.contains(gamma - complex(np.sum(P.roots)), 1e-9))}


def cmd_report(args):
    from .acceptance import run_all, format_table

    which = parse_int_list(args.criteria) if args.criteria else None
    results = run_all(which)
    print(format_table(results), file=sys.stderr)
    doc = {
        "criteria": [
            {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail, "seconds": r.seconds}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    if not doc["all_passed"]:
        raise NotConverged(doc)
    return doc


# ---- parser

def _add_lattice(p):
    p.add_argument("--lattice", choices=["square", "hexagonal"], default="square")
    p.add_argument("--w1", help="first generator, e.g. 1 or 1+0.2j (overrides --lattice)")
    p.add_argument("--w2", help="second generator")


def _add_optim(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=4000)


COMMANDS = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="packing-lab", description="Packing numbers on the sphere and flat tori.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--json-input", help="recompute a saved JSON result from its inputs and compare")
        p.set_defaults(func=fn)
        COMMANDS[name] = fn
        return p

    p = add("sphere-moment", cmd_sphere_moment, "closed-form moment of exp(alpha U_S)")
    p.add_argument("--alpha", type=float, help="required unless --json-input is given")

    p = add("weyl-norm", cmd_weyl_norm, "Weyl norm from coefficients or roots")
    p.add_argument("--coeffs", help="ascending coefficients, comma separated")
    p.add_argument("--roots")
    p.add_argument("--degree", type=int, default=None, help="ambient degree (default: exact degree)")
    p.add_argument("--integral-resolution", type=int, default=None)

    p = add("bombieri", cmd_bombieri, "Bombieri ratio of a product")
    for q in ("q1", "q2"):
        p.add_argument(f"--{q}-roots")
        p.add_argument(f"--{q}-coeffs")

    p = add("sphere-pack", cmd_sphere_pack, "estimate (or evaluate) sphere packing integrals")
    p.add_argument("--n", default="2", help="N, a list 4,8 or a range 4-32")
    p.add_argument("--beta", default="2", help="beta or a comma list")
    p.add_argument("--cfg", help="evaluate this configuration instead of optimizing")
    _add_optim(p)

    p = add("rho-pack", cmd_rho_pack, "rho-zero packing functional")
    p.add_argument("--cfg", help="required unless --json-input is given")
    p.add_argument("--beta", type=float, default=2.0)

    p = add("sigma-eval", cmd_sigma_eval, "Weierstrass sigma and the modified sigma")
    _add_lattice(p)
    p.add_argument("--z", default="0.3+0.2j")

    p = add("lattice-normalize", cmd_lattice_normalize, "normalize two generators")
    p.add_argument("--w1")
    p.add_argument("--w2")
    p.set_defaults(lattice="square")

    p = add("torus-green", cmd_torus_green, "torus Green function")
    _add_lattice(p)
    p.add_argument("--z", default="0.3+0.2j")
    p.add_argument("--w", default="0")
    p.add_argument("--wprime", default=None)

    p = add("torus-moment", cmd_torus_moment, "E(beta) on a torus")
    _add_lattice(p)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--pole", default="0")

    p = add("torus-pack", cmd_torus_pack, "torus packing integrals: optimize, evaluate or coset configuration")
    _add_lattice(p)
    p.add_argument("--n", default="2")
    p.add_argument("--beta", default="2")
    p.add_argument("--cfg")
    p.add_argument("--cosets", action="store_true", help="evaluate at the refined-lattice cosets (both routes)")
    _add_optim(p)

    p = add("refine-lattice", cmd_refine_lattice, "refined lattice and its cosets")
    _add_lattice(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--renormalized", action="store_true")

    p = add("verify-superposition", cmd_verify_superposition, "superposition identity error")
    _add_lattice(p)
    p.add_argument("--n", type=int, default=1)

    p = add("pseudo-norm", cmd_pseudo_norm, "L^beta norm of a pseudopolynomial and its bounds")
    _add_lattice(p)
    p.add_argument("--roots", default="0")
    p.add_argument("--beta", type=float, default=1.0)

    p = add("fiber-check", cmd_fiber_check, "fiber PDE and periodicity residuals")
    _add_lattice(p)
    p.add_argument("--roots", default="0")
    p.add_argument("--gamma", default=None, help="default: sum of the roots")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--grid", type=int, default=16)

    p = add("report", cmd_report, "run the acceptance suite and print a pass/fail table")
    p.add_argument("--criteria", default=None, help="subset, e.g. 1,2,7")
    return parser


CSV_COLUMNS = ["N", "beta", "value", "est_error", "converged", "seed"]


def render(doc, fmt: str) -> str:
    if fmt == "csv":
        rows = doc["rows"] if isinstance(doc, dict) and "rows" in doc else [doc]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([repr(float(r[c])) if isinstance(r.get(c), float) else r.get(c, "") for c in CSV_COLUMNS])
        return buf.getvalue()
    return json.dumps(to_jsonable(doc), indent=2) + "\n"


def _not_converged(doc) -> bool:
    rows = doc["rows"] if isinstance(doc, dict) and "rows" in doc else [doc]
    return any(isinstance(r, dict) and r.get("converged") is False for r in rows)


INPUT_SKIP = {"func", "output", "format", "json_input", "command"}


def run(argv) -> int:
    argv = list(argv)
    parser = build_parser()
    first = argv[0] if argv else None
    if first is None or (first not in COMMANDS and first not in ("-h", "--help", "--version")):
        parser.print_usage(sys.stderr)
        if first is not None:
            print(f"unknown subcommand: {first}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports bad flags with code 2
        return int(exc.code or 0)

    saved = None
    if args.json_input:
        try:
            with open(args.json_input, encoding="utf-8") as fh:
                saved = json.load(fh)
            for k, v in saved["inputs"].items():
                if k not in INPUT_SKIP:
                    setattr(args, k, v)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"error: cannot re-ingest {args.json_input}: {exc}", file=sys.stderr)
            return EXIT_INPUT

    code = EXIT_OK
    try:
        doc = args.func(args)
    except NotConverged as exc:
        doc, code = exc.payload, EXIT_NUMERIC
    except ValueError as exc:  # includes InputError and the library's domain errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if isinstance(doc, dict):
        doc = {"command": args.command, **doc,
               "inputs": {k: v for k, v in vars(args).items() if k not in INPUT_SKIP}}
        if saved is not None:
            fresh = json.loads(json.dumps(to_jsonable(doc)))
            ok, diff = compare_documents(saved, fresh)
            doc["round_trip"] = {"reproduced": ok, "max_rel_diff": diff, "tolerance": ROUND_TRIP_TOL}
            if not ok:
                code = EXIT_NUMERIC
    if code == EXIT_OK and _not_converged(doc):
        code = EXIT_NUMERIC

    text = render(doc, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
