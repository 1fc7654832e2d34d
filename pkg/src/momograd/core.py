"""Basic multiobjective quantities: the max-inner-product function, the
row-max matrix norm, the pseudo-inverse of a scalar and Pareto dominance.

A Jacobian is an ``(m, n)`` array whose i-th row is the gradient of the i-th
objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class EvaluationError(ArithmeticError):
    """Raised when an objective or Jacobian evaluation produces NaN/Inf."""


def psi(jac: np.ndarray, d: np.ndarray) -> float:
    """Return ``max_i <grad F_i(x), d>``.

    A direction ``d`` decreases every objective to first order exactly when
    this value is negative.
    """
    jac = np.atleast_2d(np.asarray(jac, dtype=float))
    d = np.asarray(d, dtype=float).ravel()
    if jac.shape[1] != d.shape[0]:
        raise ValueError(
            f"dimension mismatch: jacobian has {jac.shape[1]} columns, d has {d.shape[0]}"
        )
    return float(np.max(jac @ d))


def row_max_norm(a: np.ndarray) -> float:
    """Largest Euclidean norm over the rows of ``a``.

    This is the operator norm from (R^n, l2) to (R^m, l_inf).
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0.0
    return float(np.max(np.sqrt(np.sum(a * a, axis=1))))


def chi_plus(chi: float) -> float:
    """``1/chi`` for nonzero ``chi``, else 0."""
    return 0.0 if chi == 0 else 1.0 / chi


def dominates(a, b) -> bool:
    """True iff ``a <= b`` componentwise and ``a != b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


@dataclass(frozen=True)
class MultiObjectiveProblem:
    """A smooth map ``F: R^n -> R^m`` with its Jacobian.

    ``bounds`` is the box used to sample starting points; the problem itself
    is unconstrained. ``convex`` is metadata only.
    """

    name: str
    n: int
    m: int
    f: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    convex: bool = False
    source: str = ""
    lipschitz: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.n,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.n,)).copy()
        if np.any(lower > upper):
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Objective vector at ``x``; raises :class:`EvaluationError` if not finite."""
        with np.errstate(all="ignore"):
            fx = np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float).reshape(self.m)
        if not np.all(np.isfinite(fx)):
            raise EvaluationError(f"{self.name}: non-finite objective value {fx}")
        return fx

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """``(m, n)`` Jacobian at ``x``; raises :class:`EvaluationError` if not finite."""
        with np.errstate(all="ignore"):
            jx = np.asarray(self.jac(np.asarray(x, dtype=float)), dtype=float).reshape(
                self.m, self.n
            )
        if not np.all(np.isfinite(jx)):
            raise EvaluationError(f"{self.name}: non-finite Jacobian entry")
        return jx
