"""Command line front end: ``orlimink <subcommand> [flags]``.

Exit codes: 0 success, 1 verification failure or numerical breakdown,
2 degenerate measure, 3 iteration limit, 4 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import worker_count
from .body_kernel import InvalidBodyError, load_json, radial_function, save_json, to_csv_2d, to_obj
from .measure_engine import (
    MeasureError,
    dual_orlicz_curvature_measure,
    dual_orlicz_mixed_volume,
    dual_orlicz_quermassintegral,
    load_measure,
)
from .minkowski_solver import (
    CONVERGED,
    DEGENERATE,
    INVALID_PAIR,
    MAX_ITERS,
    SolverConfig,
    SolverError,
    solve_dual_orlicz_minkowski,
)
from .orlicz_pairs import (
    PairError,
    RadialAdditionError,
    RadialAdditionSpec,
    addition_residual,
    parse_function_spec,
    parse_pair_spec,
    radial_addition,
)
from .sphere_quadrature import QuadratureError
from .verification import LEVELS, run_suite

EXIT_OK, EXIT_FAIL, EXIT_DEGENERATE, EXIT_MAX_ITERS, EXIT_INVALID = 0, 1, 2, 3, 4
_TERMINATION_CODES = {CONVERGED: EXIT_OK, DEGENERATE: EXIT_DEGENERATE,
                      MAX_ITERS: EXIT_MAX_ITERS, INVALID_PAIR: EXIT_INVALID}


class UsageError(Exception):
    """Bad flag combination or unreadable input (exit 4)."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orlimink",
                                     description="Dual Orlicz curvature measures and Minkowski problems.")
    parser.add_argument("--version", action="version", version=f"orlimink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pair=True):
        p.add_argument("--grid", type=int, help="quadrature resolution (number of nodes)")
        p.add_argument("--grid-rule", choices=("equal_angle_2d", "fibonacci_3d", "monte_carlo"))
        p.add_argument("--seed", type=int)
        p.add_argument("--dim", type=int, help="expected dimension of the inputs")
        p.add_argument("--out", default=".", help="output directory")
        if pair:
            p.add_argument("--pair", default="power:-1", help="power:<q> or table:<path>")

    p = sub.add_parser("solve", help="solve the dual Orlicz-Minkowski problem for a measure")
    common(p)
    p.add_argument("--measure", required=True)
    p.add_argument("--config", help="JSON file with solver settings")
    p.add_argument("--tol-res", type=float)
    p.add_argument("--tol-con", type=float)
    p.add_argument("--max-iters", type=int)

    p = sub.add_parser("measure", help="dual Orlicz curvature measure of a body")
    common(p)
    p.add_argument("--body", required=True)

    p = sub.add_parser("quermass", help="dual Orlicz quermassintegral (or mixed volume with --body2)")
    common(p)
    p.add_argument("--body", required=True)
    p.add_argument("--body2")
    p.add_argument("--psi", help="function spec for the mixed volume, e.g. power:2")

    p = sub.add_parser("addition", help="linear Orlicz radial addition of two bodies")
    common(p)
    p.add_argument("--body", required=True)
    p.add_argument("--body2", required=True)
    p.add_argument("--psi", help="phi2 spec (default: same as --pair, which gives phi1)")
    p.add_argument("--epsilon", type=float, default=1.0)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--grid", default="quick", choices=sorted(LEVELS),
                   help="resolution level of the suite")
    p.add_argument("--out", default=".")

    p = sub.add_parser("export", help="convert a body JSON to OBJ (3-D) or CSV (2-D)")
    p.add_argument("--body", required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--out", default=".")
    return parser


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _grid(args, dim: int):
    cfg = SolverConfig(grid_rule=args.grid_rule, resolution=args.grid, seed=args.seed)
    return cfg.make_grid(dim)


def _check_dim(args, dim: int, what: str):
    if getattr(args, "dim", None) is not None and args.dim != dim:
        raise UsageError(f"--dim {args.dim} does not match the {dim}-dimensional {what}")


def _write(out: Path, name: str, text: str, written: list):
    path = out / name
    path.write_text(text)
    written.append(name)


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _grid_info(grid) -> dict:
    return {"rule": grid.rule, "resolution": grid.resolution, "seed": grid.seed}


# --------------------------------------------------------------------------
# subcommands; each returns (exit code, manifest extras)
# --------------------------------------------------------------------------

def _cmd_solve(args, out: Path, written: list):
    mu = load_measure(args.measure)
    _check_dim(args, mu.dim, "measure")
    pair = parse_pair_spec(args.pair)
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: malformed JSON at line {exc.lineno}: {exc.msg}")
        if not isinstance(data, dict):
            raise UsageError(f"{args.config}: expected a JSON object of solver settings")
    overrides = {"grid_rule": args.grid_rule, "resolution": args.grid, "seed": args.seed,
                 "tol_res": args.tol_res, "tol_con": args.tol_con, "max_iters": args.max_iters}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        cfg = SolverConfig.from_dict({**data, **overrides})
    except (TypeError, ValueError) as exc:
        raise UsageError(f"solver config: {exc}")
    grid = cfg.make_grid(mu.dim)
    report = solve_dual_orlicz_minkowski(mu, pair, cfg, grid)

    doc = report.to_dict()
    doc["pair"] = pair.label
    doc["config"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(cfg).items()}
    _write(out, "report.json", _json(doc), written)
    if report.body is not None:
        _write(out, "body.json", _json(report.body.to_dict()), written)
        if report.body.dim == 3:
            _write(out, "body.obj", to_obj(report.body), written)
        elif report.body.dim == 2:
            _write(out, "body.csv", to_csv_2d(report.body), written)
    print(f"termination: {report.termination} after {report.iterations} iterations")
    if report.message:
        print(report.message)
    if report.body is not None:
        print(f"max residual {report.max_residual:.3e}, tau {report.tau:.12g}")
    extras = {"inputs": {"measure": args.measure}, "pair": pair.label,
              "grid": _grid_info(grid), "config_overrides": overrides}
    if args.config:
        extras["inputs"]["config"] = args.config
    return _TERMINATION_CODES[report.termination], extras


def _cmd_measure(args, out: Path, written: list):
    body = load_json(args.body)
    _check_dim(args, body.dim, "body")
    pair = parse_pair_spec(args.pair)
    grid = _grid(args, body.dim)
    cm = dual_orlicz_curvature_measure(body, pair, grid)
    _write(out, "measure.json", _json(cm.to_dict()), written)
    print(f"total {cm.total:.12g} over {body.n_facets} facets")
    return EXIT_OK, {"inputs": {"body": args.body}, "pair": pair.label, "grid": _grid_info(grid)}


def _cmd_quermass(args, out: Path, written: list):
    body = load_json(args.body)
    _check_dim(args, body.dim, "body")
    grid = _grid(args, body.dim)
    extras = {"inputs": {"body": args.body}, "grid": _grid_info(grid)}
    if args.body2:
        if not args.psi:
            raise UsageError("a mixed volume (--body2) needs --psi")
        other = load_json(args.body2)
        if other.dim != body.dim:
            raise UsageError("--body and --body2 have different dimensions")
        value = dual_orlicz_mixed_volume(body, other, parse_function_spec(args.psi), grid)
        doc = {"kind": "dual_orlicz_mixed_volume", "psi": args.psi, "value": value}
        extras["inputs"]["body2"] = args.body2
        extras["psi"] = args.psi
    else:
        pair = parse_pair_spec(args.pair)
        value = dual_orlicz_quermassintegral(body, pair, grid)
        doc = {"kind": "dual_orlicz_quermassintegral", "phi_label": pair.label, "value": value}
        extras["pair"] = pair.label
    doc["grid"] = {"rule": grid.rule, "resolution": grid.resolution}
    _write(out, "quermass.json", _json(doc), written)
    print(f"{doc['kind']}: {value:.15g}")
    return EXIT_OK, extras


def _cmd_addition(args, out: Path, written: list):
    K, L = load_json(args.body), load_json(args.body2)
    if K.dim != L.dim:
        raise UsageError("--body and --body2 have different dimensions")
    _check_dim(args, K.dim, "bodies")
    phi1 = parse_function_spec(args.pair)
    phi2 = parse_function_spec(args.psi or args.pair)
    spec = RadialAdditionSpec(phi1, phi2, args.epsilon)
    grid = _grid(args, K.dim)
    rk = radial_function(K, grid.nodes)[0]
    rl = radial_function(L, grid.nodes)[0]
    rho = radial_addition(rk, rl, spec)
    res = addition_residual(rho, rk, rl, spec)
    cols = [f"u{i}" for i in range(K.dim)] + ["rho_k", "rho_l", "rho", "residual"]
    table = np.column_stack((grid.nodes, rk, rl, rho, res))
    lines = [",".join(cols)] + [",".join(f"{x:.17g}" for x in row) for row in table]
    _write(out, "addition.csv", "\n".join(lines) + "\n", written)
    print(f"max |residual| {np.max(np.abs(res)):.3e} over {len(grid)} nodes")
    return EXIT_OK, {"inputs": {"body": args.body, "body2": args.body2},
                     "pair": args.pair, "psi": args.psi or args.pair,
                     "epsilon": args.epsilon, "grid": _grid_info(grid)}


def _cmd_verify(args, out: Path, written: list):
    checks = run_suite(args.grid)
    lines = ["check,value,tolerance,passed,seconds,detail"]
    for c in checks:
        print(c.row())
        lines.append(f"{c.name},{c.value:.6e},{c.tol:.1e},{c.passed},{c.seconds:.3f},"
                     f"\"{c.detail}\"")
    _write(out, "verify.csv", "\n".join(lines) + "\n", written)
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return (EXIT_OK if ok else EXIT_FAIL), {"grid": {"level": args.grid}}


def _cmd_export(args, out: Path, written: list):
    body = load_json(args.body)
    _check_dim(args, body.dim, "body")
    save_json(body, out / "body.json")
    written.append("body.json")
    if body.dim == 3:
        _write(out, "body.obj", to_obj(body), written)
    elif body.dim == 2:
        _write(out, "body.csv", to_csv_2d(body), written)
    else:
        raise UsageError("OBJ/CSV export needs a 2-D or 3-D body")
    return EXIT_OK, {"inputs": {"body": args.body}}


_COMMANDS = {"solve": _cmd_solve, "measure": _cmd_measure, "quermass": _cmd_quermass,
             "addition": _cmd_addition, "verify": _cmd_verify, "export": _cmd_export}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; keep 2 for degenerate measures only
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    out = Path(args.out)
    written: list = []
    t0 = time.perf_counter()
    try:
        out.mkdir(parents=True, exist_ok=True)
        code, extras = _COMMANDS[args.command](args, out, written)
    except (UsageError, InvalidBodyError, MeasureError, PairError, QuadratureError,
            FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"orlimink {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, RadialAdditionError) as exc:
        print(f"orlimink {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    manifest = {
        "subcommand": args.command,
        "version": __version__,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "output_dir": str(out),
        "outputs": written,
        "threads": worker_count(),
        "exit_code": code,
        **extras,
        "duration_seconds": time.perf_counter() - t0,
    }
    (out / "manifest.json").write_text(_json(manifest))
    return code


def main() -> None:
    sys.exit(run())
