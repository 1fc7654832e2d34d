"""Memory gradient descent for smooth multiobjective optimization."""

from .core import EvaluationError, MultiObjectiveProblem, chi_plus, dominates, psi, row_max_norm
from .directions import DirectionState, MmgParams
from .linesearch import LineSearchConfig
from .solver import (
    Method, SolverConfig, SolverTrace, Status, baseline, comparison_methods, mmg_i1, mmg_i2, solve,
)
from .subproblem import SubproblemSolution, is_critical, solve_dual

__version__ = "0.1.0"

__all__ = [
    "DirectionState",
    "EvaluationError",
    "LineSearchConfig",
    "Method",
    "MmgParams",
    "MultiObjectiveProblem",
    "SolverConfig",
    "SolverTrace",
    "Status",
    "SubproblemSolution",
    "baseline",
    "chi_plus",
    "comparison_methods",
    "dominates",
    "is_critical",
    "mmg_i1",
    "mmg_i2",
    "psi",
    "row_max_norm",
    "solve",
    "solve_dual",
]
