"""Command-line front end.

Subcommands: ``solve``, ``equiv``, ``spectrum``, ``gen`` and ``axioms``.
Exit status is 0 on success/pass, 1 on a failed check or a run that did
not converge, and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .classical import (
    ClassicalMethod,
    ClassicalSpec,
    classical_iteration_matrix,
    classical_run,
)
from .discrete_gradients import BlockItohAbe, DiscreteGradient, check_axioms
from .equivalence import check_equivalence, h_to_omega, omega_to_h
from .errors import DgsolveError
from .linalg import Preconditioner, SpdSystem, block_split, spectral_radius
from .mmio import load_matrix_market, write_matrix_market
from .problems import generate
from .schemes import DEFAULT_MAX_ITERS, Method, SchemeSpec, iteration_matrix, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DG_METHODS = [m.value for m in Method]
CLASSICAL_METHODS = [m.value for m in ClassicalMethod]
GENERATORS = ["laplacian1d", "laplacian2d", "random-spd"]
AXIOM_KINDS = [k.value for k in DiscreteGradient] + ["block-itoh-abe"]


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("DGSOLVE_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"DGSOLVE_SEED must be an integer, got {raw!r}") from None


def _finite_or_none(v: float):
    return float(v) if math.isfinite(v) else None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)


def _parse_boundaries(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--blocks expects comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------- arguments


def _problem_args(p: argparse.ArgumentParser, default_gen: str | None = None) -> None:
    p.set_defaults(default_gen=default_gen)
    g = p.add_argument_group("problem")
    g.add_argument("--matrix", type=Path, help="Matrix Market file holding A")
    g.add_argument("--rhs", type=Path, help="Matrix Market file holding b")
    g.add_argument("--gen", choices=GENERATORS, help="generate A instead of loading it")
    g.add_argument("--n", type=int, default=8, help="size (grid side for laplacian2d)")
    g.add_argument("--m", type=int, help="grid side for laplacian2d (overrides --n)")
    g.add_argument("--seed", type=int, help="RNG seed (default: $DGSOLVE_SEED or 0)")
    g.add_argument("--rhs-kind", choices=["ones-solution", "random"], default="ones-solution")


def _method_args(p: argparse.ArgumentParser, methods: list[str]) -> None:
    g = p.add_argument_group("method")
    g.add_argument("--method", choices=methods, required=True)
    g.add_argument("--p", dest="precond", choices=["identity", "jacobi", "block-jacobi", "explicit"])
    g.add_argument("--p-file", type=Path, help="Matrix Market file for --p explicit")
    g.add_argument("--blocks", help="block start indices, e.g. '4,8' (0-based)")
    _param_args(g)


def _param_args(g) -> None:
    par = g.add_mutually_exclusive_group()
    par.add_argument("--h", type=float, help="stepsize (mapped to omega for classical methods)")
    par.add_argument("--omega", type=float, help="relaxation parameter (mapped to h for DG methods)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgsolve",
        description="SOR-type solvers as discrete gradient schemes for SPD systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one iteration and write its trace")
    _problem_args(p)
    _method_args(p, DG_METHODS + CLASSICAL_METHODS)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--trace", type=Path, help="write the per-iteration trace here")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--summary", type=Path, help="also write the JSON summary here")

    p = sub.add_parser("equiv", help="check a DG scheme against its SOR-type twin")
    _problem_args(p, default_gen="random-spd")
    p.add_argument("--pair", choices=["sor", "ssor", "block-sor"], required=True)
    p.add_argument("--blocks", help="block start indices for block-sor")
    _param_args(p)
    p.add_argument("--K", dest="k", type=int, default=200, help="iterates compared")
    p.add_argument("--instances", type=int, default=1, help="random instances (seeds seed, seed+1, ...)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("spectrum", help="print the spectral radius of an iteration matrix")
    _problem_args(p)
    _method_args(p, DG_METHODS + CLASSICAL_METHODS)

    p = sub.add_parser("gen", help="write a generated problem as Matrix Market files")
    _problem_args(p)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--name", help="file stem (default: generator name)")

    p = sub.add_parser("axioms", help="sample the discrete-gradient axioms")
    _problem_args(p, default_gen="random-spd")
    p.add_argument("--kind", choices=AXIOM_KINDS + ["all"], default="all")
    p.add_argument("--blocks", help="partition for block-itoh-abe (default: two halves)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    return parser


# ------------------------------------------------------------------ helpers


def load_problem(args, seed: int | None = None) -> SpdSystem:
    seed = args.seed if seed is None else seed
    if seed is None:
        seed = default_seed()
    gen = args.gen
    if args.matrix is not None and gen is not None:
        raise UsageError("give either --matrix or --gen, not both")
    if args.matrix is None and gen is None:
        gen = args.default_gen
    if args.matrix is not None:
        a = load_matrix_market(args.matrix, vector=False)
        if args.rhs is not None:
            b = load_matrix_market(args.rhs, vector=True)
        elif args.rhs_kind == "random":
            b = np.random.default_rng([seed, 1]).standard_normal(a.shape[0])
        else:
            b = a @ np.ones(a.shape[0])
        return SpdSystem(a, b)
    if gen is None:
        raise UsageError("a problem is required: --matrix PATH or --gen KIND")
    size = args.m if (gen == "laplacian2d" and args.m is not None) else args.n
    if size is None or size < 1:
        raise UsageError("problem size must be positive")
    system = generate(gen, size, seed=seed, rhs=args.rhs_kind)
    if args.rhs is not None:
        system = SpdSystem(system.a, load_matrix_market(args.rhs, vector=True))
    return system


def _preconditioner(args, system: SpdSystem, blocks) -> Preconditioner:
    kind = args.precond
    if kind is None:
        kind = "block-jacobi" if args.method == "dg-block" else "identity"
    if kind == "identity":
        return Preconditioner.identity()
    if kind == "jacobi":
        return Preconditioner.jacobi()
    if kind == "block-jacobi":
        if blocks is None:
            raise UsageError("--p block-jacobi needs --blocks")
        return Preconditioner.block_jacobi(blocks.boundaries)
    if args.p_file is None:
        raise UsageError("--p explicit needs --p-file")
    return Preconditioner.explicit(load_matrix_market(args.p_file, vector=False))


def build_spec(args, system: SpdSystem):
    """Return ``(spec, parameter_name, parameter_value)`` for --method."""
    boundaries = _parse_boundaries(getattr(args, "blocks", None))
    blocks = None
    if boundaries is not None:
        blocks = block_split(system, boundaries)
    elif args.method in ("dg-block", "block-sor"):
        raise UsageError(f"{args.method} needs --blocks")

    if args.method in CLASSICAL_METHODS:
        method = ClassicalMethod(args.method)
        if method is ClassicalMethod.GAUSS_SEIDEL and args.h is None and args.omega is None:
            omega = 1.0
        elif args.omega is not None:
            omega = args.omega
        elif args.h is not None:
            omega = h_to_omega(args.h)
        else:
            raise UsageError("give exactly one of --h or --omega")
        return ClassicalSpec(method, omega, blocks), "omega", omega

    if args.h is not None:
        h = args.h
    elif args.omega is not None:
        h = omega_to_h(args.omega)
    else:
        raise UsageError("give exactly one of --h or --omega")
    method = Method(args.method)
    precond = _preconditioner(args, system, blocks)
    return SchemeSpec(method, h, precond, blocks), "h", h


def _iteration_matrix(spec, system):
    if isinstance(spec, ClassicalSpec):
        return classical_iteration_matrix(spec, system)
    return iteration_matrix(spec, system)


# -------------------------------------------------------------- subcommands


def cmd_solve(args) -> int:
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.max_iters < 1:
        raise UsageError("--max-iters must be at least 1")
    system = load_problem(args)
    spec, pname, pvalue = build_spec(args, system)
    if isinstance(spec, ClassicalSpec):
        trace = classical_run(spec, system, tol=args.tol, max_iters=args.max_iters)
    else:
        trace = run(spec, system, tol=args.tol, max_iters=args.max_iters)
    rho = spectral_radius(_iteration_matrix(spec, system)[0])
    summary = {
        "method": args.method,
        "parameter": {pname: pvalue},
        "iterations": trace.iterations,
        "final_residual": _finite_or_none(trace.final_residual),
        "spectral_radius": _finite_or_none(rho),
        "converged": trace.converged,
    }
    rows = [
        {"k": k, "energy": e, "residual": r, "decrement": d}
        for k, (e, r, d) in enumerate(zip(trace.energies, trace.residual_norms, trace.decrements))
    ]
    if args.trace is not None:
        write_trace(args.trace, args.format, rows, summary)
    text = _dump(summary)
    if args.summary is not None:
        args.summary.write_text(text + "\n", encoding="utf-8")
    print(text)
    x = trace.solution
    if np.all(np.isfinite(x)):
        err = float(np.max(np.abs(x - system.solution)))
        print(f"max |x - A^-1 b| = {err:.3e}", file=sys.stderr)
    return EXIT_OK if trace.converged else EXIT_FAIL


def write_trace(path: Path, fmt: str, rows: list[dict], summary: dict) -> None:
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["k", "energy", "residual", "decrement"])
            writer.writeheader()
            for row in rows:
                writer.writerow({key: (repr(v) if isinstance(v, float) else v) for key, v in row.items()})
        return
    clean = [{key: (_finite_or_none(v) if isinstance(v, float) else v) for key, v in row.items()} for row in rows]
    path.write_text(_dump({"summary": summary, "trace": clean}) + "\n", encoding="utf-8")


def cmd_equiv(args) -> int:
    if args.h is not None:
        omega = h_to_omega(args.h)
    elif args.omega is not None:
        omega = args.omega
    else:
        raise UsageError("give exactly one of --h or --omega")
    if args.instances < 1 or args.workers < 1 or args.k < 0:
        raise UsageError("--instances, --workers must be positive and --K nonnegative")
    boundaries = _parse_boundaries(args.blocks)
    base_seed = args.seed if args.seed is not None else default_seed()
    if args.instances > 1 and args.matrix is not None:
        raise UsageError("--instances needs a generated problem")

    def one(idx: int):
        system = load_problem(args, seed=base_seed + idx)
        blocks = block_split(system, boundaries) if boundaries is not None else None
        return check_equivalence(args.pair, system, omega, k=args.k, blocks=blocks).as_dict()

    reports = _map(one, range(args.instances), args.workers)
    passed = all(r["passed"] for r in reports)
    out = reports[0] if len(reports) == 1 else {"passed": passed, "reports": reports}
    print(_dump(out))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_spectrum(args) -> int:
    system = load_problem(args)
    spec, pname, pvalue = build_spec(args, system)
    rho = spectral_radius(_iteration_matrix(spec, system)[0])
    print(
        _dump(
            {
                "method": args.method,
                "parameter": {pname: pvalue},
                "spectral_radius": _finite_or_none(rho),
                "convergent": bool(rho < 1.0),
            }
        )
    )
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.gen is None:
        raise UsageError("gen needs --gen KIND")
    system = load_problem(args)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.name or args.gen
    a_path = args.out_dir / f"{stem}_A.mtx"
    b_path = args.out_dir / f"{stem}_b.mtx"
    write_matrix_market(a_path, system.a)
    write_matrix_market(b_path, system.b)
    print(_dump({"matrix": str(a_path), "rhs": str(b_path), "n": system.n}))
    return EXIT_OK


def cmd_axioms(args) -> int:
    if args.samples < 1 or args.workers < 1:
        raise UsageError("--samples and --workers must be positive")
    seed = args.seed if args.seed is not None else default_seed()
    system = load_problem(args, seed=seed)
    n = system.n
    boundaries = _parse_boundaries(args.blocks)
    if boundaries is None:
        boundaries = (n // 2,) if n > 1 else ()
    blocks = block_split(system, boundaries)

    kinds = AXIOM_KINDS if args.kind == "all" else [args.kind]
    rng = np.random.default_rng([seed, 2])
    pairs = [(rng.standard_normal(n), rng.standard_normal(n)) for _ in range(args.samples)]

    def measure(kind_name: str) -> dict:
        kind = BlockItohAbe(blocks) if kind_name == "block-itoh-abe" else DiscreteGradient(kind_name)
        chain = consistency = 0.0
        ok = True
        for x, y in pairs:
            rep = check_axioms(kind, system, x, y)
            chain = max(chain, rep.chain_rule_residual or 0.0)
            consistency = max(consistency, rep.consistency_residual)
            ok = ok and rep.passed
        return {
            "kind": kind_name,
            "max_chain_rule_residual": chain,
            "max_consistency_residual": consistency,
            "passed": ok,
        }

    results = _map(measure, kinds, args.workers)
    passed = all(r["passed"] for r in results)
    print(_dump({"samples": args.samples, "n": n, "passed": passed, "results": results}))
    return EXIT_OK if passed else EXIT_FAIL


def _map(fn, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


COMMANDS = {
    "solve": cmd_solve,
    "equiv": cmd_equiv,
    "spectrum": cmd_spectrum,
    "gen": cmd_gen,
    "axioms": cmd_axioms,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DgsolveError, OSError, ValueError) as exc:
        print(f"dgsolve {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
