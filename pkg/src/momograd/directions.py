"""Search directions: the memory gradient direction and the SD/FR/CD/HS baselines."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import chi_plus, psi, row_max_norm
from .subproblem import SubproblemSolution

DESCENT_SLACK = 1e-12


class DescentViolation(RuntimeError):
    """A memory direction failed to be a descent direction."""


@dataclass(frozen=True)
class MmgParams:
    """Parameters of the memory gradient direction.

    ``gamma_rule`` is ``"constant"`` (gamma_k = 1) or ``"bb"`` (ratio of
    successive iterate and steepest-direction differences, safeguarded below by
    ``gamma_star`` and above by ``gamma_max``).
    """

    N: int = 5
    gamma_rule: str = "constant"
    gamma_star: float = 1e-10
    zeta: float = 1e-4
    gamma_max: float = 1e6

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("memory depth N must be >= 1")
        if self.gamma_rule not in ("constant", "bb"):
            raise ValueError(f"unknown gamma rule {self.gamma_rule!r}")
        if not self.gamma_star > 0 or not self.zeta > 0:
            raise ValueError("gamma_star and zeta must be positive")
        if self.gamma_max < self.gamma_star:
            raise ValueError("gamma_max must be >= gamma_star")


@dataclass
class DirectionState:
    """What a run remembers between iterations.

    ``history[0]`` is the most recent direction d^{k-1}.
    """

    N: int = 1
    k: int = 0
    history: deque = field(default_factory=deque)
    prev_x: Optional[np.ndarray] = None
    prev_v: Optional[np.ndarray] = None
    prev_jac: Optional[np.ndarray] = None
    prev_psi_v: Optional[float] = None
    prev_psi_d: Optional[float] = None

    def __post_init__(self):
        self.history = deque(self.history, maxlen=self.N)

    @property
    def n_memory(self) -> int:
        return len(self.history)

    def push(self, x, v, jac, d, psi_v: float, psi_d: float) -> None:
        """Record iteration k's quantities and advance to k + 1."""
        self.history.appendleft(np.array(d, dtype=float))
        self.prev_x = np.array(x, dtype=float)
        self.prev_v = np.array(v, dtype=float)
        self.prev_jac = np.array(jac, dtype=float)
        self.prev_psi_v = float(psi_v)
        self.prev_psi_d = float(psi_d)
        self.k += 1


def compute_gamma(state: DirectionState, x: np.ndarray, v: np.ndarray, params: MmgParams) -> float:
    if params.gamma_rule == "constant" or state.k == 0 or state.prev_x is None:
        return 1.0
    h = float(np.linalg.norm(np.asarray(v) - state.prev_v))
    if h == 0.0:
        return 1.0
    ratio = float(np.linalg.norm(np.asarray(x) - state.prev_x)) / h
    if not ratio >= params.gamma_star:
        return 1.0
    return min(ratio, params.gamma_max)


def compute_phi(psi_d_prev: float, jf_norm: float, d_prev_norm: float, gamma: float, zeta: float) -> float:
    if gamma <= 0 or zeta <= 0:
        raise ValueError("gamma and zeta must be positive")
    return (psi_d_prev + jf_norm * d_prev_norm + zeta) / gamma


def compute_beta(psi_v: float, n_memory: int, phi: float) -> float:
    return -(1.0 / n_memory) * psi_v * chi_plus(phi)


@dataclass(frozen=True)
class MemoryDirection:
    d: np.ndarray
    gamma: float
    betas: tuple


def memory_direction(
    cur: SubproblemSolution,
    x: np.ndarray,
    jac: np.ndarray,
    state: DirectionState,
    params: MmgParams,
) -> MemoryDirection:
    """Blend ``gamma_k v(x^k)`` with the stored directions.

    Each weight is ``beta_kj = -psi(x^k, v)/N_k * phi_kj^+`` where ``phi_kj``
    exceeds ``(psi(x^k, d^{k-j}) + |JF(x^k)| |d^{k-j}|)/gamma_k`` by
    ``zeta/gamma_k``; ``psi(x^k, d^{k-j})`` uses the current Jacobian.
    """
    v = cur.v
    psi_v = psi(jac, v)
    gamma = compute_gamma(state, x, v, params)
    d = gamma * v
    betas = []
    if state.k > 0 and state.n_memory > 0:
        jf_norm = row_max_norm(jac)
        n_mem = state.n_memory
        for d_old in state.history:
            phi = compute_phi(psi(jac, d_old), jf_norm, float(np.linalg.norm(d_old)), gamma, params.zeta)
            beta = compute_beta(psi_v, n_mem, phi)
            betas.append(beta)
            d = d + beta * d_old
    psi_d = psi(jac, d)
    if not psi_d <= DESCENT_SLACK:
        raise DescentViolation(f"memory direction is not a descent direction: psi={psi_d:.3e}")
    return MemoryDirection(d=d, gamma=gamma, betas=tuple(betas))


BASELINES = ("sd", "fr", "cd", "hs")


def baseline_beta(kind: str, cur: SubproblemSolution, jac: np.ndarray, state: DirectionState) -> float:
    """Conjugate-gradient weight for the previous direction (0 for SD)."""
    kind = kind.lower()
    if kind not in BASELINES:
        raise ValueError(f"unknown baseline {kind!r}")
    if kind == "sd" or state.k == 0 or not state.history:
        return 0.0
    psi_v = psi(jac, cur.v)
    d_prev = state.history[0]
    if kind == "fr":
        return psi_v / state.prev_psi_v if state.prev_psi_v else 0.0
    if kind == "cd":
        return psi_v / state.prev_psi_d if state.prev_psi_d else 0.0
    # HS: (-psi(x^k, v^k) + psi(x^{k-1}, v^k)) / (psi(x^k, d^{k-1}) - psi(x^{k-1}, d^{k-1}))
    num = -psi_v + psi(state.prev_jac, cur.v)
    den = psi(jac, d_prev) - state.prev_psi_d
    if den == 0.0:
        return 0.0
    return max(0.0, num / den)


def baseline_direction(kind: str, cur: SubproblemSolution, jac: np.ndarray, state: DirectionState) -> np.ndarray:
    beta = baseline_beta(kind, cur, jac, state)
    if beta == 0.0:
        return np.array(cur.v, dtype=float)
    return cur.v + beta * state.history[0]
