"""Steepest common descent direction via the simplex-constrained dual QP.

For a Jacobian ``J`` the direction ``v`` minimises ``psi(J, d) + |d|^2/2``.
Its dual is ``min_{lam in simplex} |J^T lam|^2`` and ``v = -J^T lam``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EvaluationError, psi

DEFAULT_TOL = 1e-10
MAX_INNER_ITERS = 10_000
POLISH_EVERY = 25


@dataclass(frozen=True)
class SubproblemSolution:
    v: np.ndarray
    theta: float
    lam: np.ndarray
    kkt_residual: float
    iterations: int = 0


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum(x) = 1}`` (sort-based)."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    if not np.all(np.isfinite(u)):
        raise EvaluationError("non-finite point passed to simplex projection")
    hits = np.nonzero(u - css / idx > 0)[0]
    # the first index always qualifies in exact arithmetic
    r = hits[-1] + 1 if hits.size else 1
    t = css[r - 1] / r
    return np.maximum(y - t, 0.0)


def _kkt_residual(gram: np.ndarray, lam: np.ndarray) -> float:
    # norm of the projected-gradient map with unit step
    grad = 2.0 * gram @ lam
    return float(np.max(np.abs(lam - project_simplex(lam - grad))))


def _finish(jac: np.ndarray, lam: np.ndarray, residual: float, iters: int) -> SubproblemSolution:
    v = -(jac.T @ lam)
    theta = psi(jac, v) + 0.5 * float(v @ v)
    if not (np.all(np.isfinite(lam)) and np.isfinite(theta)):
        raise EvaluationError("subproblem overflowed")
    return SubproblemSolution(v=v, theta=theta, lam=lam, kkt_residual=residual, iterations=iters)


def _pairwise(jac: np.ndarray) -> SubproblemSolution:
    g1, g2 = jac
    diff = g1 - g2
    with np.errstate(over="ignore"):
        denom = float(diff @ diff)
    if not np.isfinite(denom):
        raise EvaluationError("gradient difference overflowed")
    if denom == 0.0:
        lam = np.array([0.5, 0.5])
    else:
        # each weight from its own numerator; 1 - lam1 cancels when lam2 is tiny
        lam1 = float(g2 @ (g2 - g1)) / denom
        lam2 = float(g1 @ (g1 - g2)) / denom
        if lam1 <= 0.0:
            lam = np.array([0.0, 1.0])
        elif lam2 <= 0.0:
            lam = np.array([1.0, 0.0])
        else:
            lam = np.array([lam1, lam2]) / (lam1 + lam2)
    with np.errstate(over="ignore", invalid="ignore"):
        gram = jac @ jac.T
    if not np.all(np.isfinite(gram)):
        raise EvaluationError("Gram matrix overflowed")
    return _finish(jac, lam, _kkt_residual(gram, lam), 0)


def projected_gradient(
    gram: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iters: int = MAX_INNER_ITERS,
    history: list | None = None,
) -> tuple[np.ndarray, float, int]:
    """Minimise ``lam^T G lam`` over the simplex by projected gradient.

    Starts from the uniform weights and uses the fixed step ``1/(2 tr G)``,
    ``tr G`` bounding the spectral norm of the PSD Gram matrix. Every
    ``POLISH_EVERY`` iterations the current support is solved exactly, which
    removes the slow geometric tail on degenerate faces. If ``history``
    is a list, the dual objective after every iterate is appended to it.
    """
    m = gram.shape[0]
    lam = np.full(m, 1.0 / m)
    bound = float(np.trace(gram))
    if history is not None:
        history.append(float(lam @ gram @ lam))
    if bound == 0.0:
        return lam, 0.0, 0
    step = 1.0 / (2.0 * bound)
    residual = _kkt_residual(gram, lam)
    it = 0
    while residual > tol and it < max_iters:
        lam = project_simplex(lam - step * 2.0 * (gram @ lam))
        it += 1
        residual = _kkt_residual(gram, lam)
        if residual > tol and it % POLISH_EVERY == 0:
            lam, residual = _polish(gram, lam, residual)
        if history is not None:
            history.append(float(lam @ gram @ lam))
    return lam, residual, it


def _solve_on_support(gram: np.ndarray, support: np.ndarray) -> np.ndarray | None:
    k = int(support.sum())
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * gram[np.ix_(support, support)]
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
    return sol if np.all(np.isfinite(sol)) else None


def _polish(gram: np.ndarray, lam: np.ndarray, residual: float) -> tuple[np.ndarray, float]:
    # Projected gradient finds roughly the right face but crawls along it when
    # the Gram matrix is ill-conditioned. Solve the equality-constrained
    # problem on the current support exactly, dropping the most negative
    # weight until the solution is feasible, and keep it only if it is at
    # least as stationary. The problem is convex, so the KKT residual is a
    # safe yardstick where objective values would drown in rounding.
    support = lam > 1e-9
    while support.any():
        sol = _solve_on_support(gram, support)
        if sol is None:
            break
        if np.all(sol >= -1e-12):
            sol = np.clip(sol, 0.0, None)
            cand = np.zeros_like(lam)
            cand[support] = sol / sol.sum()
            cand_residual = _kkt_residual(gram, cand)
            if cand_residual <= residual:
                return cand, cand_residual
            break
        idx = np.flatnonzero(support)
        support[idx[int(np.argmin(sol))]] = False
    return lam, residual


def solve_dual(jac: np.ndarray, tol: float = DEFAULT_TOL) -> SubproblemSolution:
    """Compute ``v(x)``, ``theta(x)`` and the dual weights for Jacobian ``jac``.

    One and two objectives are handled in closed form; otherwise the dual is
    solved by :func:`projected_gradient` and then polished exactly on the
    support it finds. Identical gradients yield uniform
    weights.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    jac = np.atleast_2d(np.asarray(jac, dtype=float))
    if not np.all(np.isfinite(jac)):
        raise EvaluationError("non-finite Jacobian passed to solve_dual")
    m = jac.shape[0]
    if m == 1:
        return _finish(jac, np.ones(1), 0.0, 0)
    if m == 2:
        return _pairwise(jac)
    with np.errstate(over="ignore", invalid="ignore"):
        gram = jac @ jac.T
    if not np.all(np.isfinite(gram)):
        raise EvaluationError("Gram matrix overflowed")
    lam, residual, iters = projected_gradient(gram, tol)
    if residual > 0.0:
        lam, residual = _polish(gram, lam, residual)
    return _finish(jac, lam, residual, iters)


def is_critical(sol: SubproblemSolution, eps_theta: float) -> bool:
    if eps_theta <= 0:
        raise ValueError("eps_theta must be positive")
    return abs(sol.theta) <= eps_theta
