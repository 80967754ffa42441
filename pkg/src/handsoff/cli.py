"""Command-line front end.

Exit codes: 0 success, 1 usage or internal error (and failed checks),
2 infeasible / out of range.  Messages go to stderr, data to ``--out`` or
stdout.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .analysis import AxisSpec, ValueTable, parse_grid, reach_box, sweep
from .l1lp import solve_lp, transcribe
from .model import SystemFileError, load_system
from .oracle import (Oracle1dParams, OutOfReachError, oracle1d_control,
                     oracle1d_reach, oracle1d_value)
from .shooting import NotNormalError, shoot_solve
from .simplex import SolverError
from .suite import run_suite
from .svgplot import UnsupportedDimensionError, value_plot_svg

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
DEFAULT_CELLS = 2000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parse_xi(text, n):
    try:
        xi = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--xi must be comma-separated reals, got {text!r}") from None
    if len(xi) != n:
        raise UsageError(f"--xi has {len(xi)} entries, system has {n} states")
    return np.array(xi)


def _system(args):
    if not args.system:
        raise UsageError("--system is required")
    try:
        return load_system(args.system)
    except OSError as exc:
        raise UsageError(f"cannot read system file: {exc}") from None
    except SystemFileError as exc:
        raise UsageError(f"bad system file: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"bad system: {exc}") from None


def _result_doc(res):
    doc = {
        "status": res.status,
        "method": res.method,
        "value_l1": _num(res.value),
        "value_l0": _num(res.value_l0),
        "fractional_cells": res.fractional_cells,
        "residual": _num(res.residual),
        "control": res.control.values.tolist() if res.control is not None else [],
    }
    if res.switching is not None:
        doc["switching_times"] = list(res.switching.times)
        doc["switching_levels"] = list(res.switching.levels)
    return doc


def cmd_solve(args):
    system = _system(args)
    if args.xi is None:
        raise UsageError("--xi is required")
    xi = _parse_xi(args.xi, system.n)
    if args.cells < 1:
        raise UsageError("--cells must be >= 1")
    a1 = system.assumption1
    if args.method in ("shoot", "both") and not a1.normal and not args.force:
        raise UsageError("shooting refused, Assumption 1 fails: "
                         + "; ".join(a1.reasons()) + " (use --force to override)")

    lp = solve_lp(transcribe(system, xi, args.cells), zero_tol=args.zero_tol)
    if args.method == "lp":
        doc = _result_doc(lp)
    else:
        sh = shoot_solve(system, xi, seed=args.seed, N_quad=max(1, args.cells // 10),
                         force=args.force, zero_tol=args.zero_tol)
        if args.method == "shoot":
            if sh.feasible:
                doc = _result_doc(sh)
            else:
                # shooting failed: fall back to the LP answer, flagged
                doc = _result_doc(lp)
                doc["fallback"] = "lp"
                doc["shooting_status"] = sh.status
        else:
            doc = _result_doc(lp)
            doc["shoot"] = _result_doc(sh)
            doc["shoot"].pop("control")
            if sh.feasible and lp.feasible:
                doc["agreement"] = abs(sh.value - lp.value)
    doc["xi"] = xi.tolist()
    doc["cells"] = args.cells
    doc["seed"] = args.seed
    doc["assumption1"] = a1.as_dict()
    _emit(_dumps(doc), args.out)
    print(f"status: {doc['status']}", file=sys.stderr)
    return EXIT_OK if doc["status"] == "solved" else EXIT_INFEASIBLE


def cmd_sweep(args):
    system = _system(args)
    if args.grid is not None:
        try:
            axes = parse_grid(args.grid)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        box = reach_box(system, args.cells)
        count = 201 if system.n == 1 else 21
        axes = [AxisSpec(-h, h, count) for h in box]
    if len(axes) != system.n:
        raise UsageError(f"--grid has {len(axes)} axes, system has {system.n} states")
    table = sweep(system, axes, args.cells, jobs=args.jobs)
    _emit(table.to_csv(), args.out)
    for idx, msg in table.meta["failures"]:
        print(f"point {idx}: solver failure: {msg}", file=sys.stderr)
    feas = table.values[table.feasible]
    summary = f"{int(table.feasible.sum())}/{len(table.values)} feasible"
    if feas.size:
        summary += f"; V in [{feas.min():.6g}, {feas.max():.6g}]"
    print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_check(args):
    system = _system(args)
    a1 = system.assumption1
    if not a1.normal and not args.force:
        print("refusing to run: Assumption 1 fails (" + "; ".join(a1.reasons())
              + "); use --force to run anyway", file=sys.stderr)
        return EXIT_ERROR
    if not a1.normal:
        print("WARNING: system is not normal; L1 solutions may be non-unique "
              "and the suite is expected to fail", file=sys.stderr)
    report = run_suite(system, N=args.cells, seed=args.seed, jobs=args.jobs,
                       force=args.force)
    _emit(report.table() + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_ERROR


def cmd_plot(args):
    if not args.table:
        raise UsageError("plot needs an input table (CSV)")
    try:
        with open(args.table, newline="") as fh:
            table = ValueTable.from_csv(fh)
    except OSError as exc:
        raise UsageError(f"cannot read table: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"bad table: {exc}") from None
    try:
        svg, warnings = value_plot_svg(table, title=args.title)
    except UnsupportedDimensionError as exc:
        raise UsageError(str(exc)) from None
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(svg, args.out)
    return EXIT_OK


def cmd_oracle1d(args):
    try:
        params = Oracle1dParams(args.a, args.b, args.T)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    xi = args.xi_value
    try:
        value = oracle1d_value(params, xi)
        control = oracle1d_control(params, xi)
    except OutOfReachError as exc:
        print(f"out of range: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    doc = {
        "x1": oracle1d_reach(params),
        "V0": value,
        "tau": value,
        "level": control.levels[0],
        "a": params.a, "b": params.b, "T": params.T, "xi": xi,
    }
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", help="JSON system file {A, B, T}")
    common.add_argument("--cells", type=int, default=DEFAULT_CELLS, help="LP grid cells N")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for multi-start randomness")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for sweeps")
    common.add_argument("--force", action="store_true",
                        help="run on systems failing Assumption 1")
    common.add_argument("--zero-tol", type=float, default=1e-8, dest="zero_tol",
                        help="magnitude below which a control value counts as zero")

    p = _Parser(prog="handsoff", description="Sparse (L0) optimal control via L1 relaxation.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve one instance")
    s.add_argument("--xi", help="initial state, comma-separated")
    s.add_argument("--method", choices=("lp", "shoot", "both"), default="lp")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sweep", parents=[common], help="value table on a lattice")
    s.add_argument("--grid", help='axes "min:max:count[,min:max:count...]"')
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("check", parents=[common], help="run the verification suite")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("plot", parents=[common], help="SVG plot of a 1-D value table")
    s.add_argument("table", nargs="?", help="value table CSV")
    s.add_argument("--title")
    s.set_defaults(func=cmd_plot)

    s = sub.add_parser("oracle1d", parents=[common], help="closed forms for dx/dt = a x + b u")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--xi", type=float, required=True, dest="xi_value")
    s.set_defaults(func=cmd_oracle1d)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"handsoff {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (NotNormalError, SolverError) as exc:
        print(f"handsoff {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
