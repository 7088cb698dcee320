"""Command-line harness: simulate, sweep, diagnose, slope."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .diagnostics import minimax_lower_bound, report_to_json, report_to_text
from .graphs import make_topology
from .harness import (
    ExperimentSpec,
    fit_slope,
    parse_config,
    records_from_csv,
    records_to_csv,
    run_sweep,
    summarize,
)

__all__ = ["main"]


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="graph family")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, help="single problem size")
    group.add_argument("--n-list", help="comma-separated sizes, e.g. 64,128,256")
    p.add_argument("--model", choices=("ns", "sst"), default="ns")
    p.add_argument("--lambda", dest="lambda_star", type=float, default=0.4)
    p.add_argument("--estimator", choices=("asp", "bap", "bap1"), default="asp")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("bernoulli", "expectation"), default="bernoulli")
    p.add_argument("--alpha", type=float, default=None, help="bipartite exponent")
    p.add_argument("--p", type=float, default=None, help="Erdos-Renyi edge probability")


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.n_list:
        n_values = tuple(int(tok) for tok in args.n_list.split(","))
    else:
        n_values = (args.n,)
    return ExperimentSpec(
        graph_family=args.graph,
        n_values=n_values,
        model=args.model,
        lambda_star=args.lambda_star,
        estimator=args.estimator,
        trials=args.trials,
        master_seed=args.seed,
        mode=args.mode,
        bipartite_alpha=args.alpha,
        edge_probability=args.p,
    )


def _emit_sweep(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    records = run_sweep(spec, workers=args.workers)
    csv_text = records_to_csv(records, include_runtime=args.timings)
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    sys.stderr.write(summarize(records))
    try:
        for key, fit in fit_slope(records).items():
            name = "/".join(str(k) for k in key)
            if fit.status == "exact":
                sys.stderr.write(f"slope[{name}]: exact (zero mean error)\n")
            else:
                sys.stderr.write(
                    f"slope[{name}]: {fit.slope:.4f} (intercept {fit.intercept:.4f}, "
                    f"r2 {fit.r_squared:.4f}, {fit.n_points} sizes)\n"
                )
    except ValueError:
        pass  # single-n runs have no slope
    return 1 if any(r.error for r in records) else 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    return _emit_sweep(_spec_from_args(args), args)


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = parse_config(Path(args.config).read_text())
    return _emit_sweep(spec, args)


def _cmd_diagnose(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed) if args.graph == "erdos_renyi" else None
    g = make_topology(args.graph, args.n, alpha=args.alpha, p=args.p, rng=rng)
    report = minimax_lower_bound(g)
    text = report_to_json(report) + "\n" if args.json else report_to_text(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_slope(args: argparse.Namespace) -> int:
    records = records_from_csv(Path(args.input).read_text())
    for key, fit in fit_slope(records).items():
        name = "/".join(str(k) for k in key)
        if fit.status == "exact":
            print(f"{name}: exact (zero mean error)")
        else:
            print(
                f"{name}: slope={fit.slope:.6g} intercept={fit.intercept:.6g} "
                f"r2={fit.r_squared:.6g} sizes={fit.n_points}"
            )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="paircomp",
        description="Pairwise-comparison estimation experiments on fixed topologies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a sweep specified inline by flags")
    _add_spec_flags(p_sim)
    p_sim.add_argument("--out", help="CSV output path (default: stdout)")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--timings", action="store_true", help="include runtime_ms in CSV")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a key = value config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", help="CSV output path (default: stdout)")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--timings", action="store_true", help="include runtime_ms in CSV")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_diag = sub.add_parser("diagnose", help="worst-case diagnostics for a topology")
    p_diag.add_argument("--graph", required=True)
    p_diag.add_argument("--n", type=int, required=True)
    p_diag.add_argument("--alpha", type=float, default=None)
    p_diag.add_argument("--p", type=float, default=None)
    p_diag.add_argument("--seed", type=int, default=0)
    p_diag.add_argument("--json", action="store_true")
    p_diag.add_argument("--out")
    p_diag.set_defaults(func=_cmd_diagnose)

    p_slope = sub.add_parser("slope", help="fit log-log slopes from a results CSV")
    p_slope.add_argument("--input", required=True)
    p_slope.set_defaults(func=_cmd_slope)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
