"""Command-line front end: single runs, sweeps, and the analytics table.

Exit code 0 on success.  Any anticipated failure prints one machine-readable
JSON line to stderr ({"error": ..., "detail": ...}) and exits nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import harness
from .engine import SimConfigError
from .harness import ConfigError


def _add_common(sub):
    sub.add_argument("--config", required=True, help="path to a JSON config file")
    sub.add_argument("--out", default="results", help="output directory (default: results)")
    sub.add_argument("--seed", type=int, default=None, help="override the master seed")
    sub.add_argument(
        "--replicates", type=int, default=None, help="override the replicate count"
    )
    sub.add_argument(
        "--parallelism", type=int, default=1, help="worker processes (default: 1)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopnet",
        description="Evolutionary public-goods simulations on mobile wireless networks",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="run a single parameter cell")
    _add_common(run_p)

    sweep_p = subs.add_parser("sweep", help="run the full axis product")
    _add_common(sweep_p)

    ana_p = subs.add_parser("analytics", help="analytical tables")
    ana_subs = ana_p.add_subparsers(dest="table", required=True)
    fig_p = ana_subs.add_parser(
        "fig4", help="neighbor-renewal fractions per speed (quadrature and Monte Carlo)"
    )
    fig_p.add_argument("--rad", type=float, required=True, help="neighborhood radius in meters")
    fig_p.add_argument("--R", type=float, required=True, help="field disk radius in meters")
    fig_p.add_argument(
        "--v", required=True, help="comma-separated list of speeds in meters per slot"
    )
    fig_p.add_argument("--samples", type=int, default=1_000_000)
    fig_p.add_argument("--seed", type=int, default=0)
    fig_p.add_argument("--out", default="results")
    return parser


def _load_spec(args) -> harness.SweepSpec:
    spec = harness.parse_config(args.config)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.replicates is not None:
        if args.replicates < 1:
            raise ConfigError("replicates must be at least 1")
        spec = replace(spec, replicates=args.replicates)
    return spec


def _cmd_run(args) -> int:
    spec = _load_spec(args)
    n_cells = len(spec.cells())
    if n_cells != 1:
        raise ConfigError(
            f"run expects exactly one parameter cell, config defines {n_cells};"
            " use the sweep command for axis lists"
        )
    sweep = harness.run_sweep(spec, parallelism=args.parallelism)
    paths = harness.emit_outputs(sweep, args.out)
    print(f"{len(sweep.records)} run(s) -> {paths['results']}")
    return 0


def _cmd_sweep(args) -> int:
    spec = _load_spec(args)
    sweep = harness.run_sweep(spec, parallelism=args.parallelism)
    paths = harness.emit_outputs(sweep, args.out)
    print(
        f"{len(spec.cells())} cell(s) x {spec.replicates} replicate(s)"
        f" -> {paths['results']}"
    )
    return 0


def _cmd_fig4(args) -> int:
    try:
        speeds = [float(tok) for tok in args.v.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"--v must be a comma-separated number list, got {args.v!r}")
    if not speeds:
        raise ConfigError("--v lists no speeds")
    if not (0 < args.rad < args.R):
        raise ConfigError("need 0 < --rad < --R")
    rows = harness.meeting_table(
        speeds,
        radius=args.rad,
        region_radius=args.R,
        samples=args.samples,
        master_seed=args.seed,
    )
    import os

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "meeting.csv")
    harness._write_csv(path, ("v", "f_old", "f_new", "method"), rows)
    for row in rows:
        print(f"v={row[0]:g} f_old={row[1]:.6f} f_new={row[2]:.6f} ({row[3]})")
    print(f"table -> {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_fig4(args)
    except (ConfigError, SimConfigError, OSError, ValueError) as err:
        print(json.dumps({"error": type(err).__name__, "detail": str(err)}), file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
