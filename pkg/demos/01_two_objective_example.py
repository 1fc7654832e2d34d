"""Walk through one problem by hand: F(x) = (x^2 - 4, (x - 1)^2).

Every x in [0, 1] is Pareto critical. Outside that interval the two
gradients agree in sign and a common descent direction exists.
"""

import numpy as np

from momograd import problems, solve, solve_dual
from momograd.solver import mmg_i1

p = problems.get("AP-EX")

print("Steepest common descent direction at a few points")
for x in (-2.0, 0.0, 0.5, 1.0, 2.0):
    jac = p.jacobian(np.array([x]))
    sol = solve_dual(jac)
    print(f"  x={x:+.1f}  gradients={jac.ravel()}  lambda={sol.lam}  v={sol.v[0]:+.3f}  theta={sol.theta:+.3f}")

print("\nOne run of the memory gradient method from x0 = 4.3")
trace = solve(p, [4.3], mmg_i1(N=5))
for rec in trace.records:
    step = "" if rec.alpha is None else f"  d={rec.d[0]:+.4f}  alpha={rec.alpha}"
    print(f"  k={rec.k}  x={rec.x[0]:+.6f}  F={np.round(rec.fx, 6)}  theta={rec.theta:+.2e}{step}")
print(f"status={trace.status.value}, terminal x={trace.x[0]:.6f}")
