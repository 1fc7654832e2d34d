"""Benchmark orchestration and solver-comparison metrics.

Covers nondominated filtering, purity, spacing, Dolan-More performance
profiles and the seeded experiment runner with its CSV record format.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import problems
from .core import EvaluationError, dominates
from .solver import SolverConfig, Status, solve

MATCH_TOL = 1e-8


@dataclass
class FrontSet:
    points: np.ndarray
    solver: str = ""

    def __len__(self) -> int:
        return len(self.points)


def pareto_filter(points, solver: str = "") -> FrontSet:
    """Keep the points no other point dominates; exact duplicates collapse."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return FrontSet(pts.reshape(0, pts.shape[-1] if pts.ndim == 2 else 0), solver)
    pts = np.unique(pts, axis=0)
    le = np.all(pts[:, None, :] <= pts[None, :, :], axis=2)
    lt = np.any(pts[:, None, :] < pts[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    return FrontSet(pts[~dominated], solver)


def pareto_filter_bruteforce(points) -> np.ndarray:
    """Quadratic reference filter built on :func:`dominates`."""
    pts = [tuple(p) for p in np.atleast_2d(np.asarray(points, dtype=float))]
    unique = sorted(set(pts))
    keep = [p for p in unique if not any(dominates(q, p) for q in unique)]
    return np.array(keep, dtype=float).reshape(-1, len(pts[0]))


def purity(front_s: FrontSet, front_pooled: FrontSet, match_tol: float = MATCH_TOL) -> float:
    """Fraction of the pooled front found (up to ``match_tol`` in max-norm) in ``front_s``."""
    pooled = np.atleast_2d(front_pooled.points)
    if len(pooled) == 0:
        raise ValueError("pooled front is empty")
    own = np.atleast_2d(front_s.points)
    if own.size == 0:
        return 0.0
    dist = np.max(np.abs(pooled[:, None, :] - own[None, :, :]), axis=2)
    return float(np.sum(np.min(dist, axis=1) <= match_tol)) / len(pooled)


def spacing(front: FrontSet) -> float:
    """Spread of L1 nearest-neighbour gaps; ``nan`` for fronts under two points."""
    pts = np.atleast_2d(front.points)
    if len(pts) < 2:
        return math.nan
    dist = np.sum(np.abs(pts[:, None, :] - pts[None, :, :]), axis=2)
    np.fill_diagonal(dist, np.inf)
    d = np.min(dist, axis=1)
    return float(np.sqrt(np.sum((d.mean() - d) ** 2) / (len(d) - 1)))


@dataclass
class Profile:
    """``rho[t, s]`` is the fraction of problems solver ``s`` solves within ratio ``taus[t]``."""

    solvers: list
    taus: np.ndarray
    rho: np.ndarray
    n_problems: int
    dropped: int = 0

    def at(self, solver: str, tau: float) -> float:
        s = self.solvers.index(solver)
        idx = np.searchsorted(self.taus, tau, side="right") - 1
        return 0.0 if idx < 0 else float(self.rho[idx, s])

    def rows(self) -> Iterable[tuple]:
        for s, name in enumerate(self.solvers):
            for t, tau in enumerate(self.taus):
                yield name, float(tau), float(self.rho[t, s])


def performance_profile(measures, solvers: Sequence[str]) -> Profile:
    """Dolan-More profile of a problems x solvers cost matrix.

    Failed entries are ``nan`` or ``inf`` and never count as solved. Problems
    no solver solved are dropped and counted in ``dropped``.
    """
    o = np.array(measures, dtype=float)
    if o.ndim != 2 or o.shape[1] != len(solvers):
        raise ValueError("measures must be problems x solvers")
    o[~np.isfinite(o)] = np.inf
    solved_any = np.any(np.isfinite(o), axis=1)
    dropped = int(np.sum(~solved_any))
    o = o[solved_any]
    n_p = len(o)
    if n_p == 0:
        return Profile(list(solvers), np.array([1.0]), np.zeros((1, len(solvers))), 0, dropped)
    best = np.min(o, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(best > 0, o / best, np.where(o == best, 1.0, np.inf))
    taus = np.unique(z[np.isfinite(z)])
    rho = np.array([np.sum(z <= tau, axis=0) / n_p for tau in taus])
    return Profile(list(solvers), taus, rho, n_p, dropped)


# --- experiment records -----------------------------------------------------

RECORD_COLUMNS = (
    "problem", "method", "start", "seed", "status", "iters", "f_evals",
    "jac_evals", "theta", "walltime_ms", "F_terminal",
)


class RecordFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class RunRecord:
    problem: str
    method: str
    start: int
    seed: int
    status: str
    iters: int
    f_evals: int
    jac_evals: int
    theta: float
    walltime_ms: float
    F_terminal: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def solved(self) -> bool:
        return self.status == Status.CRITICAL.value

    def key(self) -> tuple:
        return (self.problem, self.method, self.start)

    def as_row(self) -> list:
        return [
            self.problem, self.method, self.start, self.seed, self.status, self.iters,
            self.f_evals, self.jac_evals, repr(float(self.theta)), f"{self.walltime_ms:.3f}",
            ";".join(repr(float(v)) for v in self.F_terminal),
        ]


def run_one(problem_name: str, cfg: SolverConfig, start: int, seed: int) -> RunRecord:
    """Solve the scaled problem from start ``start`` and summarise the run.

    ``F_terminal`` holds the unscaled objectives, so fronts from different
    starts are comparable.
    """
    base = problems.get(problem_name)
    x0 = problems.sample_start(base, start, seed)
    cfg = replace(cfg, keep_vectors=False)
    t0 = time.perf_counter()
    try:
        scaled = problems.scale(base, x0)
        trace = solve(scaled, x0, cfg)
        status, iters, fe, je, theta = (
            trace.status.value, trace.iterations, trace.f_evals, trace.jac_evals, trace.theta,
        )
        try:
            f_term = base.evaluate(trace.x)
        except EvaluationError:
            f_term = np.full(base.m, np.nan)
    except EvaluationError:
        status, iters, fe, je, theta = Status.EVAL_ERROR.value, 0, 0, 0, math.nan
        f_term = np.full(base.m, np.nan)
    wall = (time.perf_counter() - t0) * 1000.0
    return RunRecord(problem_name, cfg.name, start, seed, status, iters, fe, je, theta, wall, f_term)


def _run_task(task):
    return run_one(*task)


def run_experiment(
    suite: Sequence[str],
    methods: Sequence[SolverConfig],
    starts_per_problem: int,
    seed: int,
    jobs: int = 1,
) -> list[RunRecord]:
    """Run every (problem, method, start) triple; all methods share the starts.

    Output order is fixed (problem, method, start) regardless of ``jobs``.
    """
    tasks = [
        (name, cfg, i, seed)
        for name in suite
        for cfg in methods
        for i in range(starts_per_problem)
    ]
    if jobs <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))


def write_records(records: Iterable[RunRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for rec in records:
        writer.writerow(rec.as_row())


def read_records(stream) -> list[RunRecord]:
    """Parse a records CSV; raises :class:`RecordFormatError` with a line number."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise RecordFormatError(1, "empty file") from None
    if tuple(h.strip() for h in header) != RECORD_COLUMNS:
        raise RecordFormatError(1, f"unexpected header {header}")
    out = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(RECORD_COLUMNS):
            raise RecordFormatError(line, f"expected {len(RECORD_COLUMNS)} fields, got {len(row)}")
        try:
            f_term = np.array([float(v) for v in row[10].split(";")]) if row[10] else np.zeros(0)
            rec = RunRecord(
                row[0], row[1], int(row[2]), int(row[3]), row[4], int(row[5]), int(row[6]),
                int(row[7]), float(row[8]), float(row[9]), f_term,
            )
        except ValueError as exc:
            raise RecordFormatError(line, str(exc)) from None
        if rec.status not in {s.value for s in Status}:
            raise RecordFormatError(line, f"unknown status {rec.status!r}")
        out.append(rec)
    return out


def records_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


# --- aggregation -------------------------------------------------------------

AGGREGATIONS = ("median", "mean", "per-start")


def _ordered(values: Iterable[str]) -> list[str]:
    return list(dict.fromkeys(values))


def measure_matrix(records: Sequence[RunRecord], metric: str = "iters", aggregate: str = "median"):
    """Collapse records into a problems x solvers matrix of ``metric``.

    ``median``/``mean`` aggregate the solved starts of each (problem, solver);
    ``per-start`` treats every (problem, start) pair as its own problem.
    Returns ``(row_labels, solvers, matrix)`` with ``nan`` for failures.
    """
    if aggregate not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {aggregate!r}")
    solvers = _ordered(r.method for r in records)
    if aggregate == "per-start":
        rows = _ordered((r.problem, r.start) for r in records)
        index = {row: i for i, row in enumerate(rows)}
        mat = np.full((len(rows), len(solvers)), np.nan)
        for r in records:
            if r.solved:
                mat[index[(r.problem, r.start)], solvers.index(r.method)] = getattr(r, metric)
        return [f"{p}#{s}" for p, s in rows], solvers, mat
    rows = _ordered(r.problem for r in records)
    mat = np.full((len(rows), len(solvers)), np.nan)
    reduce = np.median if aggregate == "median" else np.mean
    for i, p in enumerate(rows):
        for j, s in enumerate(solvers):
            vals = [getattr(r, metric) for r in records if r.problem == p and r.method == s and r.solved]
            if vals:
                mat[i, j] = float(reduce(vals))
    return rows, solvers, mat


def fronts_from_records(records: Sequence[RunRecord]) -> dict:
    """``{(problem, solver): FrontSet}`` over solved runs."""
    out = {}
    for p in _ordered(r.problem for r in records):
        for s in _ordered(r.method for r in records):
            pts = [r.F_terminal for r in records if r.problem == p and r.method == s and r.solved]
            pts = [f for f in pts if np.all(np.isfinite(f))]
            if pts:
                out[(p, s)] = pareto_filter(pts, s)
    return out


def purity_table(fronts: dict, match_tol: float = MATCH_TOL) -> dict:
    """``{(problem, solver): purity}`` against each problem's pooled front."""
    table = {}
    for p in _ordered(k[0] for k in fronts):
        own = {s: f for (pp, s), f in fronts.items() if pp == p}
        pooled = pareto_filter(np.vstack([f.points for f in own.values()]))
        for s, f in own.items():
            table[(p, s)] = purity(f, pooled, match_tol)
    return table


def purity_profile(fronts: dict, solvers: Sequence[str], match_tol: float = MATCH_TOL) -> Profile:
    """Profile of the reciprocal purity; zero purity counts as failure."""
    probs = _ordered(k[0] for k in fronts)
    mat = np.full((len(probs), len(solvers)), np.inf)
    for i, p in enumerate(probs):
        own = {s: fronts[(p, s)] for s in solvers if (p, s) in fronts}
        if not own:
            continue
        pooled = pareto_filter(np.vstack([f.points for f in own.values()]))
        for j, s in enumerate(solvers):
            if s in own:
                val = purity(own[s], pooled, match_tol)
                if val > 0:
                    mat[i, j] = 1.0 / val
    return performance_profile(mat, solvers)


def pairwise_purity_profiles(fronts: dict, solvers: Sequence[str], match_tol: float = MATCH_TOL) -> dict:
    return {
        (a, b): purity_profile(fronts, [a, b], match_tol) for a, b in combinations(solvers, 2)
    }


def spacing_table(fronts: dict, problems_: Sequence[str], solvers: Sequence[str]) -> np.ndarray:
    """Problems x solvers spacing values, ``nan`` where undefined or missing."""
    out = np.full((len(problems_), len(solvers)), np.nan)
    for i, p in enumerate(problems_):
        for j, s in enumerate(solvers):
            if (p, s) in fronts:
                out[i, j] = spacing(fronts[(p, s)])
    return out


def write_front(front: FrontSet, path: Path) -> None:
    pts = np.atleast_2d(front.points)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{i + 1}" for i in range(pts.shape[1])])
        for row in pts:
            writer.writerow([repr(float(v)) for v in row])


def read_front(path: Path, solver: str = "") -> FrontSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = [[float(v) for v in row] for row in reader if row]
    m = len(header) if header else 0
    return FrontSet(np.array(rows, dtype=float).reshape(-1, m), solver)


FRONT_SEP = "__"


def front_filename(problem: str, solver: str) -> str:
    return f"{problem}{FRONT_SEP}{solver}.csv"


def write_fronts(fronts: dict, directory: Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for (p, s), front in fronts.items():
        write_front(front, directory / front_filename(p, s))


def read_fronts(directory: Path) -> dict:
    out = {}
    directory = Path(directory)
    if not directory.is_dir():
        return out
    for path in sorted(directory.glob("*.csv")):
        stem = path.name[: -len(".csv")]
        if FRONT_SEP not in stem:
            continue
        p, s = stem.split(FRONT_SEP, 1)
        out[(p, s)] = read_front(path, s)
    return out
