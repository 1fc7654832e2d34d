"""Command-line entry point: ``momograd {solve,bench,metrics,problems}``.

Exit codes: 0 solved / success, 1 no successful bench run, 2 iteration cap,
3 line-search failure, 4 evaluation error, 64 bad arguments, 65 malformed
input data, 66 missing input file.

Trace files (``solve --trace``) hold one JSON object per line: a ``run``
header, one ``iter`` record per iterate and a closing ``result`` record.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench, problems
from .config import ConfigError, ExperimentConfig, env_seed, method_spec, solver_config
from .solver import SolverTrace, Status, solve

EXIT_OK = 0
EXIT_NO_SUCCESS = 1
EXIT_BAD_ARGS = 64
EXIT_DATA = 65
EXIT_NO_INPUT = 66

STATUS_EXIT = {
    Status.CRITICAL: 0,
    Status.MAX_ITERS: 2,
    Status.LINE_SEARCH_FAIL: 3,
    Status.EVAL_ERROR: 4,
}

UNDEFINED = "NA"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGS, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _list(a) -> list:
    return None if a is None else [float(v) for v in np.ravel(a)]


def trace_lines(trace: SolverTrace, header: dict):
    yield {"type": "run", **header}
    for r in trace.records:
        yield {
            "type": "iter",
            "k": r.k,
            "x": _list(r.x),
            "F": _list(r.fx),
            "v": _list(r.v),
            "theta": r.theta,
            "psi_v": r.psi_v,
            "d": _list(r.d),
            "psi_d": r.psi_d,
            "gamma": r.gamma,
            "betas": list(r.betas),
            "alpha": r.alpha,
            "restart": r.restart,
            "f_evals": r.f_evals,
            "jac_evals": r.jac_evals,
        }
    yield {
        "type": "result",
        "status": trace.status.value,
        "iterations": trace.iterations,
        "theta": trace.theta,
        "x": _list(trace.x),
        "F": _list(trace.fx),
        "f_evals": trace.f_evals,
        "jac_evals": trace.jac_evals,
        "message": trace.message,
    }


def write_trace(trace: SolverTrace, header: dict, path) -> None:
    with open(path, "w") as fh:
        for line in trace_lines(trace, header):
            fh.write(json.dumps(line) + "\n")


def cmd_solve(args) -> int:
    try:
        base = problems.get(args.problem)
    except KeyError:
        raise UsageError(f"unknown problem {args.problem!r}; see `momograd problems`")
    spec = {"method": args.method}
    for key in ("N", "gamma_rule", "zeta", "rho", "delta", "init_mode", "eps_theta", "max_iters"):
        value = getattr(args, key)
        if value is not None:
            spec[key] = value
    if args.method == "mmg-ii":
        spec["lipschitz_L"] = args.lipschitz if args.lipschitz is not None else base.lipschitz
        if spec["lipschitz_L"] is None:
            raise UsageError(f"mmg-ii needs --lipschitz for {base.name}")
    try:
        cfg = solver_config(method_spec(**spec))
    except ConfigError as exc:
        raise UsageError(str(exc))

    seed = env_seed(0) if args.seed is None else args.seed
    if args.x0 is not None:
        if len(args.x0) != base.n:
            raise UsageError(f"--x0 needs {base.n} values, got {len(args.x0)}")
        x0 = np.array(args.x0)
    else:
        x0 = problems.sample_start(base, args.start_index, seed)
    problem = problems.scale(base, x0) if args.scale else base
    trace = solve(problem, x0, cfg)

    header = {
        "problem": base.name, "method": cfg.name, "x0": _list(x0), "seed": seed,
        "scaled": bool(args.scale), "eps_theta": cfg.eps_theta, "max_iters": cfg.max_iters,
    }
    if args.trace:
        write_trace(trace, header, args.trace)
    fx = ", ".join(f"{v:.10g}" for v in trace.fx)
    print(f"status: {trace.status.value}")
    print(f"iterations: {trace.iterations}")
    print(f"theta: {trace.theta:.6e}")
    print(f"F: [{fx}]")
    if trace.message:
        print(f"message: {trace.message}")
    return STATUS_EXIT[trace.status]


def _write_profiles(rows, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "solver", "tau", "rho"])
        for metric, (solver, tau, rho) in rows:
            w.writerow([metric, solver, repr(tau), repr(rho)])


def profile_rows(records, fronts: dict, aggregate: str):
    rows = []
    for metric in ("iters", "f_evals"):
        _, solvers, mat = bench.measure_matrix(records, metric, aggregate)
        prof = bench.performance_profile(mat, solvers)
        rows.extend((metric, r) for r in prof.rows())
    if fronts:
        solvers = list(dict.fromkeys(r.method for r in records))
        prof = bench.purity_profile(fronts, solvers)
        rows.extend(("purity", r) for r in prof.rows())
    return rows


def cmd_bench(args) -> int:
    try:
        cfg = ExperimentConfig.load(args.config)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return EXIT_NO_INPUT
    except ConfigError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.starts is not None:
        cfg.starts = args.starts
    seed = env_seed(cfg.seed)
    if args.seed is not None:
        seed = args.seed
    out = Path(args.out or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs if args.jobs else len(os.sched_getaffinity(0))

    records = bench.run_experiment(cfg.suite, cfg.solver_configs(), cfg.starts, seed, jobs=jobs)
    with open(out / "records.csv", "w", newline="") as fh:
        bench.write_records(records, fh)
    fronts = bench.fronts_from_records(records)
    bench.write_fronts(fronts, out / "fronts")
    _write_profiles(profile_rows(records, fronts, cfg.aggregate), out / "profiles.csv")
    used = replace(cfg, seed=seed)
    (out / "config.json").write_text(used.dumps())

    solved = sum(r.solved for r in records)
    print(f"{len(records)} runs, {solved} solved; results in {out}")
    return EXIT_OK if solved else EXIT_NO_SUCCESS


def _fmt(value: float) -> str:
    return UNDEFINED if value is None or math.isnan(value) else repr(float(value))


def cmd_metrics(args) -> int:
    try:
        with open(args.records, newline="") as fh:
            records = bench.read_records(fh)
    except FileNotFoundError:
        print(f"records file not found: {args.records}", file=sys.stderr)
        return EXIT_NO_INPUT
    except bench.RecordFormatError as exc:
        print(f"{args.records}: {exc}", file=sys.stderr)
        return EXIT_DATA

    fronts_dir = Path(args.fronts) if args.fronts else Path(args.records).parent / "fronts"
    try:
        fronts = bench.read_fronts(fronts_dir)
    except (ValueError, StopIteration) as exc:
        print(f"{fronts_dir}: malformed front file: {exc}", file=sys.stderr)
        return EXIT_DATA
    out = Path(args.out) if args.out else Path(args.records).parent
    out.mkdir(parents=True, exist_ok=True)

    probs = list(dict.fromkeys(r.problem for r in records))
    solvers = list(dict.fromkeys(r.method for r in records))

    with open(out / "purity.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem", "solver", "purity"])
        for (p, s), value in sorted(bench.purity_table(fronts).items()):
            w.writerow([p, s, repr(value)])

    table = bench.spacing_table(fronts, probs, solvers)
    with open(out / "spacing.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem", *solvers])
        for p, row in zip(probs, table):
            w.writerow([p, *(_fmt(v) for v in row)])

    _write_profiles(profile_rows(records, fronts, args.aggregate), out / "profiles.csv")
    print(f"metrics for {len(probs)} problems x {len(solvers)} solvers written to {out}")
    return EXIT_OK


def cmd_problems(args) -> int:
    problems.write_metadata(sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="momograd", description="Multiobjective memory gradient solvers and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one problem from one start point")
    p.add_argument("problem", help="registered problem name")
    p.add_argument("--method", default="mmg-i", choices=["mmg-i", "mmg-ii", "sd", "fr", "cd", "hs"],
                   help="search direction / stepsize scheme (default mmg-i)")
    p.add_argument("--N", type=int, help="memory depth for mmg-* (default 5)")
    p.add_argument("--gamma-rule", dest="gamma_rule", choices=["constant", "bb"],
                   help="gamma_k rule for mmg-* (default constant)")
    p.add_argument("--zeta", type=float, help="phi offset for mmg-* (default 1e-4)")
    p.add_argument("--rho", type=float, help="Armijo slope fraction (default 1e-4)")
    p.add_argument("--delta", type=float, help="backtracking factor (default 0.5)")
    p.add_argument("--init-mode", dest="init_mode", choices=["unit", "tau_k"],
                   help="first trial step (default unit)")
    p.add_argument("--eps-theta", dest="eps_theta", type=float, help="stop when |theta| <= this (default 1e-6)")
    p.add_argument("--max-iters", dest="max_iters", type=int, help="iteration cap (default 10000)")
    p.add_argument("--lipschitz", type=float, help="Jacobian Lipschitz constant for mmg-ii")
    p.add_argument("--x0", type=_floats, help="start point, comma separated")
    p.add_argument("--seed", type=int, help="seed for the box-uniform start (default $MOMOGRAD_SEED or 0)")
    p.add_argument("--start-index", dest="start_index", type=int, default=0,
                   help="which start of the seeded stream to use (default 0)")
    p.add_argument("--scale", action="store_true", help="apply the benchmark gradient scaling at x0")
    p.add_argument("--trace", help="write the iteration trace as JSON lines to this file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark experiment from a JSON config")
    p.add_argument("config", help="experiment config (JSON)")
    p.add_argument("--jobs", type=int, help="worker processes (default: available CPUs)")
    p.add_argument("--out", help="output directory (default: config 'output')")
    p.add_argument("--starts", type=int, help="override starts per problem")
    p.add_argument("--seed", type=int, help="override the seed (else $MOMOGRAD_SEED, else config)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("metrics", help="purity, spacing and profiles from a records file")
    p.add_argument("records", help="records.csv written by `bench`")
    p.add_argument("--fronts", help="front directory (default: fronts/ next to records)")
    p.add_argument("--out", help="output directory (default: next to records)")
    p.add_argument("--aggregate", default="median", choices=list(bench.AGGREGATIONS),
                   help="how starts collapse into one measure per problem (default median)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("problems", help="print the problem registry as CSV")
    p.set_defaults(func=cmd_problems)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"momograd: error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
