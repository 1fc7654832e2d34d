"""Outer iteration for the memory gradient method and its baselines."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import EvaluationError, MultiObjectiveProblem, psi, row_max_norm
from .directions import (
    DescentViolation,
    DirectionState,
    MmgParams,
    baseline_direction,
    memory_direction,
)
from .linesearch import LineSearchConfig, LineSearchError, armijo_backtrack, lipschitz_step
from .subproblem import DEFAULT_TOL, SubproblemSolution, solve_dual


class Method(str, enum.Enum):
    MMG_I = "mmg-i"
    MMG_II = "mmg-ii"
    SD = "sd"
    FR = "fr"
    CD = "cd"
    HS = "hs"


class Status(str, enum.Enum):
    CRITICAL = "critical"
    MAX_ITERS = "max_iters"
    LINE_SEARCH_FAIL = "line_search_fail"
    EVAL_ERROR = "eval_error"


@dataclass(frozen=True)
class SolverConfig:
    method: Method = Method.MMG_I
    mmg: MmgParams = field(default_factory=MmgParams)
    ls: LineSearchConfig = field(default_factory=LineSearchConfig)
    eps_theta: float = 1e-6
    max_iters: int = 10_000
    subproblem_tol: float = DEFAULT_TOL
    keep_vectors: bool = True
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.method is Method.MMG_II and self.ls.lipschitz_L is None:
            raise ValueError("MMG-II needs ls.lipschitz_L")
        if self.max_iters < 1 or not self.eps_theta > 0:
            raise ValueError("max_iters must be positive and eps_theta > 0")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.method in (Method.MMG_I, Method.MMG_II):
            suffix = "1" if self.mmg.gamma_rule == "constant" else "2"
            return f"{self.method.value.upper()}{suffix}(N={self.mmg.N})"
        return self.method.value.upper()


def mmg_i1(N: int = 5, **kw) -> SolverConfig:
    return SolverConfig(Method.MMG_I, mmg=MmgParams(N=N, gamma_rule="constant"), **kw)


def mmg_i2(N: int = 3, **kw) -> SolverConfig:
    return SolverConfig(Method.MMG_I, mmg=MmgParams(N=N, gamma_rule="bb"), **kw)


def baseline(kind: str, **kw) -> SolverConfig:
    return SolverConfig(Method(kind.lower()), **kw)


def comparison_methods(**kw) -> list[SolverConfig]:
    """SD, FR, CD, HS, MMG-I1 with N=5 and MMG-I2 with N=3."""
    return [baseline(k, **kw) for k in ("sd", "fr", "cd", "hs")] + [mmg_i1(5, **kw), mmg_i2(3, **kw)]


@dataclass
class IterRecord:
    """Quantities at iterate k and, unless it is terminal, the step taken from it."""

    k: int
    fx: np.ndarray
    theta: float
    psi_v: float
    v_norm: float
    jf_norm: float
    x: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    d: Optional[np.ndarray] = None
    psi_d: Optional[float] = None
    d_norm_sq: Optional[float] = None
    gamma: Optional[float] = None
    betas: tuple = ()
    alpha: Optional[float] = None
    restart: bool = False
    f_evals: int = 0
    jac_evals: int = 0


@dataclass
class SolverTrace:
    records: list
    status: Status
    x: np.ndarray
    fx: np.ndarray
    theta: float
    f_evals: int
    jac_evals: int
    message: str = ""

    @property
    def iterations(self) -> int:
        return sum(1 for r in self.records if r.alpha is not None)


@dataclass
class SolverState:
    x: np.ndarray
    fx: np.ndarray
    jac: np.ndarray
    sol: SubproblemSolution
    directions: DirectionState
    k: int = 0
    f_evals: int = 0
    jac_evals: int = 0


def initial_state(problem: MultiObjectiveProblem, x0, cfg: SolverConfig) -> SolverState:
    x = np.array(x0, dtype=float).reshape(problem.n)
    fx = problem.evaluate(x)
    jac = problem.jacobian(x)
    sol = solve_dual(jac, cfg.subproblem_tol)
    n_mem = cfg.mmg.N if cfg.method in (Method.MMG_I, Method.MMG_II) else 1
    return SolverState(x, fx, jac, sol, DirectionState(N=n_mem), f_evals=1, jac_evals=1)


def _record(st: SolverState, cfg: SolverConfig) -> IterRecord:
    rec = IterRecord(
        k=st.k,
        fx=st.fx.copy(),
        theta=st.sol.theta,
        psi_v=psi(st.jac, st.sol.v),
        v_norm=float(np.linalg.norm(st.sol.v)),
        jf_norm=row_max_norm(st.jac),
        f_evals=st.f_evals,
        jac_evals=st.jac_evals,
    )
    if cfg.keep_vectors:
        rec.x = st.x.copy()
        rec.v = st.sol.v.copy()
    return rec


def step(problem: MultiObjectiveProblem, st: SolverState, cfg: SolverConfig) -> IterRecord:
    """Advance ``st`` by one iteration and return the record of iterate k.

    Raises :class:`LineSearchError`, :class:`EvaluationError` or
    :class:`DescentViolation`; ``st`` is left untouched in that case.
    """
    rec = _record(st, cfg)
    dstate = st.directions
    psi_v = rec.psi_v
    restart = False
    if cfg.method in (Method.MMG_I, Method.MMG_II):
        md = memory_direction(st.sol, st.x, st.jac, dstate, cfg.mmg)
        d, gamma, betas = md.d, md.gamma, md.betas
    else:
        d = baseline_direction(cfg.method.value, st.sol, st.jac, dstate)
        gamma, betas = 1.0, ()
        if psi(st.jac, d) >= 0:
            # conjugate direction lost descent under Armijo; restart along v
            d, restart = np.array(st.sol.v, dtype=float), True
    psi_d = psi(st.jac, d)
    if not psi_d < 0:
        raise DescentViolation(f"no numerically descending direction at k={st.k}: psi={psi_d:.3e}")
    d_sq = float(d @ d)

    if cfg.method is Method.MMG_II:
        alpha = lipschitz_step(psi_d, d_sq, cfg.ls.lipschitz_L)
        x_new = st.x + alpha * d
        fx_new = problem.evaluate(x_new)
        evals = 1
    else:
        res = armijo_backtrack(problem, st.x, st.fx, d, psi_d, cfg.ls)
        alpha, evals, fx_new = res
        x_new = st.x + alpha * d
    jac_new = problem.jacobian(x_new)
    sol_new = solve_dual(jac_new, cfg.subproblem_tol)

    dstate.push(st.x, st.sol.v, st.jac, d, psi_v, psi_d)
    st.x, st.fx, st.jac, st.sol = x_new, fx_new, jac_new, sol_new
    st.k += 1
    st.f_evals += evals
    st.jac_evals += 1

    rec.psi_d = psi_d
    rec.d_norm_sq = d_sq
    rec.gamma = gamma
    rec.betas = tuple(betas)
    rec.alpha = alpha
    rec.restart = restart
    if cfg.keep_vectors:
        rec.d = d
    return rec


def solve(problem: MultiObjectiveProblem, x0, cfg: SolverConfig = SolverConfig()) -> SolverTrace:
    """Iterate ``x^{k+1} = x^k + alpha_k d^k`` until ``|theta| <= eps_theta``.

    Failures end the run with a status instead of raising; the partial trace
    is kept.
    """
    records: list[IterRecord] = []
    try:
        st = initial_state(problem, x0, cfg)
    except EvaluationError as exc:
        x = np.array(x0, dtype=float)
        return SolverTrace([], Status.EVAL_ERROR, x, np.full(problem.m, np.nan), np.nan, 0, 0, str(exc))

    status, message = Status.MAX_ITERS, ""
    while True:
        if abs(st.sol.theta) <= cfg.eps_theta:
            status = Status.CRITICAL
            break
        if st.k >= cfg.max_iters:
            break
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                records.append(step(problem, st, cfg))
        except LineSearchError as exc:
            status, message = Status.LINE_SEARCH_FAIL, str(exc)
            break
        except (EvaluationError, DescentViolation, FloatingPointError) as exc:
            status, message = Status.EVAL_ERROR, str(exc)
            break
    records.append(_record(st, cfg))
    return SolverTrace(records, status, st.x, st.fx, st.sol.theta, st.f_evals, st.jac_evals, message)
