"""Plug in your own objectives.

Three objectives on R^2: distances to the corners of a triangle. Its
Pareto critical set is the triangle itself, so every run must stop inside.
"""

import numpy as np

from momograd import MultiObjectiveProblem, solve
from momograd.solver import mmg_i2

corners = np.array([[0.0, 0.0], [4.0, 0.0], [1.0, 3.0]])

triangle = MultiObjectiveProblem(
    name="triangle",
    n=2,
    m=3,
    f=lambda x: np.sum((x - corners) ** 2, axis=1),
    jac=lambda x: 2.0 * (x - corners),
    lower=-5.0,
    upper=8.0,
    convex=True,
)

rng = np.random.default_rng(3)
for x0 in rng.uniform(-5, 8, size=(5, 2)):
    trace = solve(triangle, x0, mmg_i2(3))
    # barycentric coordinates of the terminal point; all >= 0 inside the triangle
    a = np.vstack([corners.T, np.ones(3)])
    bary = np.linalg.solve(a, np.append(trace.x, 1.0))
    print(f"x0={np.round(x0, 2)} -> x={np.round(trace.x, 4)}  iters={trace.iterations}  "
          f"barycentric={np.round(bary, 3)}  status={trace.status.value}")
