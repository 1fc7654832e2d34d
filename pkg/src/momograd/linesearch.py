"""Stepsize rules: componentwise Armijo backtracking and the Lipschitz step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import EvaluationError, MultiObjectiveProblem


class LineSearchError(RuntimeError):
    """No trial step satisfied the Armijo test within ``max_backtracks``."""


@dataclass(frozen=True)
class LineSearchConfig:
    """Backtracking settings.

    ``init_mode="tau_k"`` starts at ``-psi(x, d)/|d|^2``; ``"unit"`` starts at 1.
    ``lipschitz_L`` is only used by the Lipschitz stepsize.
    """

    rho: float = 1e-4
    delta: float = 0.5
    init_mode: str = "unit"
    max_backtracks: int = 60
    lipschitz_L: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.rho < 1 or not 0 < self.delta < 1:
            raise ValueError("rho and delta must lie in (0, 1)")
        if self.init_mode not in ("tau_k", "unit"):
            raise ValueError(f"unknown init mode {self.init_mode!r}")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be positive")
        if self.lipschitz_L is not None and not self.lipschitz_L > 0:
            raise ValueError("lipschitz_L must be positive")


class StepResult(NamedTuple):
    alpha: float
    f_evals: int
    fx_new: np.ndarray


def armijo_accepts(fx: np.ndarray, f_trial: np.ndarray, alpha: float, psi_xd: float, rho: float) -> bool:
    """Componentwise test ``F(x + alpha d) <= F(x) + rho alpha psi(x, d) e``."""
    return bool(np.all(f_trial <= fx + rho * alpha * psi_xd))


def armijo_backtrack(
    problem: MultiObjectiveProblem,
    x: np.ndarray,
    fx: np.ndarray,
    d: np.ndarray,
    psi_xd: float,
    cfg: LineSearchConfig,
) -> StepResult:
    """Largest ``alpha_0 delta^i`` passing the componentwise Armijo test.

    Trial points where the objectives are not finite count as rejections.
    """
    if not psi_xd < 0:
        raise ValueError("psi(x, d) must be negative for a descent direction")
    d_sq = float(d @ d)
    if d_sq == 0.0:
        raise ValueError("zero search direction")
    if not np.isfinite(d_sq):
        raise EvaluationError("search direction overflowed")
    alpha = -psi_xd / d_sq if cfg.init_mode == "tau_k" else 1.0
    evals = 0
    for _ in range(cfg.max_backtracks + 1):
        evals += 1
        try:
            f_trial = problem.evaluate(x + alpha * d)
        except EvaluationError:
            f_trial = None
        if f_trial is not None and armijo_accepts(fx, f_trial, alpha, psi_xd, cfg.rho):
            return StepResult(alpha, evals, f_trial)
        alpha *= cfg.delta
    raise LineSearchError(f"Armijo test failed after {cfg.max_backtracks} backtracks")


def lipschitz_step(psi_xd: float, d_norm_sq: float, L: float) -> float:
    """``-psi(x, d) / (2 L |d|^2)``."""
    if not psi_xd < 0 or not d_norm_sq > 0 or not L > 0:
        raise ValueError("need psi < 0, |d|^2 > 0 and L > 0")
    return -psi_xd / (2.0 * L * d_norm_sq)
