"""A small benchmark, end to end, without touching the file system.

Runs three solvers on three problems from ten shared starts, then turns
the records into an iteration profile, purity and spacing.
"""

import numpy as np

from momograd import bench
from momograd.solver import baseline, mmg_i1, mmg_i2

suite = ["BK1", "SD", "Toi4"]
methods = [baseline("sd"), mmg_i1(5), mmg_i2(3)]
records = bench.run_experiment(suite, methods, starts_per_problem=10, seed=0)
print(f"{len(records)} runs, {sum(r.solved for r in records)} reached |theta| <= 1e-6")

rows, solvers, med = bench.measure_matrix(records, "iters", "median")
print("\nMedian iterations")
print(f"{'':<8}" + "".join(f"{s:>14}" for s in solvers))
for name, row in zip(rows, med):
    print(f"{name:<8}" + "".join(f"{v:>14.1f}" for v in row))

profile = bench.performance_profile(med, solvers)
print("\nShare of problems where each solver is fastest (profile at tau = 1)")
for s in solvers:
    print(f"  {s:<14}{profile.at(s, 1.0):.2f}")

fronts = bench.fronts_from_records(records)
print("\nPurity / spacing of each solver's nondominated terminal points")
for (problem, solver), value in bench.purity_table(fronts).items():
    sp = bench.spacing(fronts[(problem, solver)])
    sp_text = "NA" if np.isnan(sp) else f"{sp:.4f}"
    print(f"  {problem:<6}{solver:<14}purity={value:.2f}  spacing={sp_text}")
