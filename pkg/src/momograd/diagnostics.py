"""Post-hoc checks on solver traces.

Each ``*_violations`` helper returns the iteration indices that break the
corresponding inequality, so an empty list means the run complied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solver import SolverTrace


def _steps(trace: SolverTrace):
    """Pairs (record k, record k+1) for every accepted step."""
    recs = trace.records
    return [(a, b) for a, b in zip(recs, recs[1:]) if a.alpha is not None]


def descent_violations(trace: SolverTrace) -> list[int]:
    return [r.k for r in trace.records if r.psi_d is not None and not r.psi_d < 0]


def sufficient_descent_violations(trace: SolverTrace, gamma_star: float = 1e-10, slack: float = 1e-12) -> list[int]:
    """Iterations where ``psi(x, d) > (gamma_star/2) psi(x, v) + slack``."""
    return [
        r.k for r in trace.records
        if r.psi_d is not None and r.psi_d > 0.5 * gamma_star * r.psi_v + slack
    ]


def armijo_omega(rho: float, delta: float, L: float) -> float:
    """Per-step decrease constant of Armijo steps started at ``-psi/|d|^2``."""
    return min(rho, rho * delta * (1.0 - rho) / L)


def lipschitz_omega(L: float) -> float:
    return 1.0 / (4.0 * L)


def decrease_violations(trace: SolverTrace, omega: float, slack: float = 1e-10) -> list[int]:
    """Steps with ``F(x^k) - F(x^{k+1}) < omega psi^2/|d|^2 - slack`` in some objective."""
    bad = []
    for a, b in _steps(trace):
        need = omega * a.psi_d ** 2 / a.d_norm_sq - slack
        if np.any(a.fx - b.fx < need):
            bad.append(a.k)
    return bad


def monotonicity_violations(trace: SolverTrace) -> list[int]:
    return [a.k for a, b in _steps(trace) if np.any(b.fx > a.fx)]


def nonpositive_betas(trace: SolverTrace) -> list[int]:
    return [r.k for r in trace.records if any(not b > 0 for b in r.betas)]


def summability_terms(trace: SolverTrace) -> np.ndarray:
    """Partial sums of ``psi(x^k, d^k)^2 / |d^k|^2``."""
    terms = [a.psi_d ** 2 / a.d_norm_sq for a, _ in _steps(trace)]
    return np.cumsum(terms) if terms else np.zeros(0)


def min_vnorm_slope(trace: SolverTrace, fraction: float = 0.5) -> float:
    """Log-log slope of ``min_{j<=k} |v(x^j)|`` against ``k+1`` over the leading part of the run.

    ``nan`` when fewer than three usable points exist.
    """
    v = np.array([r.v_norm for r in trace.records])
    best = np.minimum.accumulate(v)
    count = max(int(len(best) * fraction), 0)
    k = np.arange(1, count + 1)
    y = best[:count]
    keep = y > 0
    if np.sum(keep) < 3:
        return float("nan")
    return float(np.polyfit(np.log(k[keep]), np.log(y[keep]), 1)[0])


@dataclass(frozen=True)
class RateFit:
    mu: float
    r2: float
    points: int

    def passes(self, r2_min: float = 0.9) -> bool:
        return 0.0 < self.mu < 1.0 and self.r2 >= r2_min


def linear_rate_fit(trace: SolverTrace, floor: float = 1e-14) -> list:
    """Fit ``F_i(x^k) - F_i(x_end) ~ C (1 - mu)^k`` on a log scale, per objective.

    The terminal iterate stands in for the limit point. Gaps at or below
    ``floor * (1 + |F_i(x_end)|)`` are dropped as round-off. Objectives
    with no usable gap yield ``None``; one or two points fit exactly.
    """
    fx = np.array([r.fx for r in trace.records])
    if len(fx) < 2:
        return [None] * trace.fx.size
    end = fx[-1]
    fits = []
    for i in range(fx.shape[1]):
        gap = fx[:-1, i] - end[i]
        k = np.arange(len(gap))
        keep = gap > floor * (1.0 + abs(end[i]))
        if not np.any(keep):
            fits.append(None)
            continue
        kk, y = k[keep], np.log(gap[keep])
        if len(kk) == 1:
            fits.append(RateFit(mu=float("nan"), r2=1.0, points=1))
            continue
        slope, icpt = np.polyfit(kk, y, 1)
        resid = y - (slope * kk + icpt)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
        fits.append(RateFit(mu=float(1.0 - np.exp(slope)), r2=r2, points=len(kk)))
    return fits


def linear_rate_passes(trace: SolverTrace, r2_min: float = 0.9) -> bool:
    """Every objective with at least two usable gaps decays geometrically with ``R^2 >= r2_min``."""
    fits = [f for f in linear_rate_fit(trace) if f is not None and f.points >= 2]
    return all(f.passes(r2_min) for f in fits)
