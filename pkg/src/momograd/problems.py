"""Test problems, start-point sampling and gradient-based objective scaling.

Box bounds follow the benchmark table the suite was drawn from; analytic
forms are the usual ones from the cited collections (Huband et al. 2006 for
BK1, DGO1/2, Far1, FF1, MOP2, SK2; Jin et al. 2001 for JOS1; Stadler & Dauer
1993 for SD; Preuss et al. 2006 for PNR; Miglierina et al. 2008 for MMR3;
Toint 1983 as extended by Mita et al. 2019 for Toi4).
"""

from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import MultiObjectiveProblem

SQRT2 = np.sqrt(2.0)


def _ap_ex():
    def f(x):
        return np.array([x[0] ** 2 - 4.0, (x[0] - 1.0) ** 2])

    def jac(x):
        return np.array([[2.0 * x[0]], [2.0 * (x[0] - 1.0)]])

    return MultiObjectiveProblem("AP-EX", 1, 2, f, jac, [-5.0], [5.0], convex=True,
                                 source="Ansary & Panda 2015", lipschitz=2.0)


def _jos1(n: int, name: str):
    def f(x):
        return np.array([np.sum(x ** 2) / n, np.sum((x - 2.0) ** 2) / n])

    def jac(x):
        return np.vstack([2.0 * x / n, 2.0 * (x - 2.0) / n])

    return MultiObjectiveProblem(name, n, 2, f, jac, -100.0, 100.0, convex=True,
                                 source="Jin et al. 2001", lipschitz=2.0 / n)


def _bk1():
    def f(x):
        return np.array([x[0] ** 2 + x[1] ** 2, (x[0] - 5.0) ** 2 + (x[1] - 5.0) ** 2])

    def jac(x):
        return np.array([2.0 * x, 2.0 * (x - 5.0)])

    return MultiObjectiveProblem("BK1", 2, 2, f, jac, -5.0, 10.0, convex=True,
                                 source="Huband et al. 2006", lipschitz=2.0)


def _mop2():
    n = 2
    c = 1.0 / np.sqrt(n)

    def f(x):
        return np.array([1.0 - np.exp(-np.sum((x - c) ** 2)), 1.0 - np.exp(-np.sum((x + c) ** 2))])

    def jac(x):
        e1 = np.exp(-np.sum((x - c) ** 2))
        e2 = np.exp(-np.sum((x + c) ** 2))
        return np.array([2.0 * (x - c) * e1, 2.0 * (x + c) * e2])

    return MultiObjectiveProblem("MOP2", n, 2, f, jac, -4.0, 4.0, convex=False,
                                 source="Huband et al. 2006")


def _sd():
    w1 = np.array([2.0, SQRT2, SQRT2, 1.0])
    w2 = np.array([2.0, 2.0 * SQRT2, 2.0 * SQRT2, 2.0])

    def f(x):
        return np.array([w1 @ x, np.sum(w2 / x)])

    def jac(x):
        return np.array([w1, -w2 / x ** 2])

    return MultiObjectiveProblem("SD", 4, 2, f, jac, [1.0, SQRT2, SQRT2, 1.0], 3.0, convex=True,
                                 source="Stadler & Dauer 1993")


def _toi4():
    def f(x):
        return np.array([
            x[0] ** 2 + x[1] ** 2 + 1.0,
            0.5 * ((x[0] - x[1]) ** 2 + (x[2] - x[3]) ** 2) + 1.0,
        ])

    def jac(x):
        a = x[0] - x[1]
        b = x[2] - x[3]
        return np.array([
            [2.0 * x[0], 2.0 * x[1], 0.0, 0.0],
            [a, -a, b, -b],
        ])

    return MultiObjectiveProblem("Toi4", 4, 2, f, jac, -2.0, 5.0, convex=True,
                                 source="Toint 1983; Mita et al. 2019", lipschitz=2.0)


def _dgo1():
    def f(x):
        return np.array([np.sin(x[0]), np.sin(x[0] + 0.7)])

    def jac(x):
        return np.array([[np.cos(x[0])], [np.cos(x[0] + 0.7)]])

    return MultiObjectiveProblem("DGO1", 1, 2, f, jac, -10.0, 13.0, convex=False,
                                 source="Huband et al. 2006", lipschitz=1.0)


def _dgo2():
    def f(x):
        return np.array([x[0] ** 2, 9.0 - np.sqrt(81.0 - x[0] ** 2)])

    def jac(x):
        return np.array([[2.0 * x[0]], [x[0] / np.sqrt(81.0 - x[0] ** 2)]])

    return MultiObjectiveProblem("DGO2", 1, 2, f, jac, -9.0, 9.0, convex=True,
                                 source="Huband et al. 2006")


# per objective: coefficients, exponent scales and centres of the Gaussian bumps
_FAR1 = (
    (np.array([-2.0, -1.0, 1.0, 1.0, 1.0]), np.array([15.0, 20.0, 20.0, 20.0, 20.0]),
     np.array([[0.1, 0.0], [0.6, 0.6], [-0.6, 0.6], [0.6, -0.6], [-0.6, -0.6]])),
    (np.array([2.0, 1.0, -1.0, -1.0, 1.0]), np.full(5, 20.0),
     np.array([[0.0, 0.0], [0.4, 0.6], [-0.5, 0.7], [0.5, -0.7], [-0.4, -0.8]])),
)


def _far1():
    def f(x):
        return np.array([
            a @ np.exp(-s * np.sum((x - c) ** 2, axis=1)) for a, s, c in _FAR1
        ])

    def jac(x):
        rows = []
        for a, s, c in _FAR1:
            diff = x - c
            w = a * np.exp(-s * np.sum(diff ** 2, axis=1)) * (-2.0 * s)
            rows.append(w @ diff)
        return np.array(rows)

    return MultiObjectiveProblem("Far1", 2, 2, f, jac, -1.0, 1.0, convex=False,
                                 source="Huband et al. 2006")


def _sk2():
    c = np.array([2.0, -3.0, 5.0, 4.0])

    # both objectives of the original are maximised; negated here
    def f(x):
        q = 1.0 + np.sum(x ** 2) / 100.0
        return np.array([np.sum((x - c) ** 2) - 5.0, -np.sum(np.sin(x)) / q])

    def jac(x):
        q = 1.0 + np.sum(x ** 2) / 100.0
        s = np.sum(np.sin(x))
        g2 = -(np.cos(x) * q - s * x / 50.0) / q ** 2
        return np.array([2.0 * (x - c), g2])

    return MultiObjectiveProblem("SK2", 4, 2, f, jac, -10.0, 10.0, convex=False,
                                 source="Huband et al. 2006")


def _pnr():
    def f(x):
        x1, x2 = x
        return np.array([
            x1 ** 4 + x2 ** 4 - x1 ** 2 + x2 ** 2 - 10.0 * x1 * x2 + 0.25 * x1 + 20.0,
            (x1 - 1.0) ** 2 + x2 ** 2,
        ])

    def jac(x):
        x1, x2 = x
        return np.array([
            [4.0 * x1 ** 3 - 2.0 * x1 - 10.0 * x2 + 0.25, 4.0 * x2 ** 3 + 2.0 * x2 - 10.0 * x1],
            [2.0 * (x1 - 1.0), 2.0 * x2],
        ])

    return MultiObjectiveProblem("PNR", 2, 2, f, jac, -1.0, 1.0, convex=True,
                                 source="Preuss et al. 2006")


def _mmr3():
    def f(x):
        return np.array([x[0] ** 3, (x[1] - x[0]) ** 3])

    def jac(x):
        t = 3.0 * (x[1] - x[0]) ** 2
        return np.array([[3.0 * x[0] ** 2, 0.0], [-t, t]])

    return MultiObjectiveProblem("MMR3", 2, 2, f, jac, -1.0, 1.0, convex=False,
                                 source="Miglierina et al. 2008")


def _ff1():
    a = np.array([1.0, -1.0])

    def f(x):
        return np.array([1.0 - np.exp(-np.sum((x - a) ** 2)), 1.0 - np.exp(-np.sum((x + a) ** 2))])

    def jac(x):
        return np.array([
            2.0 * (x - a) * np.exp(-np.sum((x - a) ** 2)),
            2.0 * (x + a) * np.exp(-np.sum((x + a) ** 2)),
        ])

    return MultiObjectiveProblem("FF1", 2, 2, f, jac, -1.0, 1.0, convex=False,
                                 source="Huband et al. 2006")


_FACTORIES: dict[str, Callable[[], MultiObjectiveProblem]] = {
    "AP-EX": _ap_ex,
    "SK2": _sk2,
    "DGO1": _dgo1,
    "DGO2": _dgo2,
    "Toi4": _toi4,
    "Far1": _far1,
    "BK1": _bk1,
    "SD": _sd,
    "MOP2": _mop2,
    "PNR": _pnr,
    "MMR3": _mmr3,
    "FF1": _ff1,
    "JOS1a": lambda: _jos1(50, "JOS1a"),
    "JOS1b": lambda: _jos1(100, "JOS1b"),
    "JOS1c": lambda: _jos1(200, "JOS1c"),
    "JOS1d": lambda: _jos1(500, "JOS1d"),
}

_CACHE: dict[str, MultiObjectiveProblem] = {}

CONVEX_CORE = ("AP-EX", "BK1", "JOS1a", "SD")


def names() -> list[str]:
    return list(_FACTORIES)


def get(name: str) -> MultiObjectiveProblem:
    """Look up a registered problem by name (raises ``KeyError``)."""
    if name not in _FACTORIES:
        raise KeyError(f"unknown problem {name!r}")
    if name not in _CACHE:
        _CACHE[name] = _FACTORIES[name]()
    return _CACHE[name]


def registry() -> list[MultiObjectiveProblem]:
    return [get(name) for name in _FACTORIES]


def start_rng(seed: int, name: str, index: int) -> np.random.Generator:
    """Independent stream for one (problem, start index) pair."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode()), index]))


def sample_starts(problem: MultiObjectiveProblem, count: int, seed: int) -> list[np.ndarray]:
    """``count`` points drawn uniformly from the problem's box."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return [sample_start(problem, i, seed) for i in range(count)]


def sample_start(problem: MultiObjectiveProblem, index: int, seed: int) -> np.ndarray:
    u = start_rng(seed, problem.name, index).random(problem.n)
    return problem.lower + u * (problem.upper - problem.lower)


@dataclass(frozen=True)
class ScaledProblem(MultiObjectiveProblem):
    base: Optional[MultiObjectiveProblem] = None
    r: Optional[np.ndarray] = None


def scale_factors(problem: MultiObjectiveProblem, x0) -> np.ndarray:
    jac = problem.jacobian(np.asarray(x0, dtype=float))
    return 1.0 / np.maximum(1.0, np.max(np.abs(jac), axis=1))


def scale(problem: MultiObjectiveProblem, x0) -> ScaledProblem:
    """Multiply objective i by ``1/max(1, |grad F_i(x0)|_inf)``."""
    r = scale_factors(problem, x0)
    base_f, base_jac = problem.f, problem.jac
    lipschitz = None if problem.lipschitz is None else problem.lipschitz * float(np.max(r))
    return ScaledProblem(
        name=problem.name,
        n=problem.n,
        m=problem.m,
        f=lambda x: r * base_f(x),
        jac=lambda x: r[:, None] * base_jac(x),
        lower=problem.lower,
        upper=problem.upper,
        convex=problem.convex,
        source=problem.source,
        lipschitz=lipschitz,
        base=problem,
        r=r,
    )


METADATA_COLUMNS = ("name", "source", "n", "m", "convex", "x_L", "x_U")


def metadata_rows() -> list[dict]:
    rows = []
    for p in registry():
        rows.append({
            "name": p.name,
            "source": p.source,
            "n": p.n,
            "m": p.m,
            "convex": "Y" if p.convex else "N",
            "x_L": ";".join(repr(float(v)) for v in p.lower),
            "x_U": ";".join(repr(float(v)) for v in p.upper),
        })
    return rows


def write_metadata(stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=METADATA_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(metadata_rows())
