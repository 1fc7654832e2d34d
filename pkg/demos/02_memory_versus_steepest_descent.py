"""Why keep a memory of past directions?

On JOS1 with n = 50 the steepest-descent iteration zig-zags, while the
memory gradient direction reuses earlier steps. Both start from the same
seeded point and run under the benchmark's gradient scaling.
"""

from momograd import diagnostics, problems, solve
from momograd.solver import baseline, mmg_i1, mmg_i2

base = problems.get("JOS1a")
x0 = problems.sample_start(base, index=0, seed=1)
scaled = problems.scale(base, x0)

print(f"{'method':<14}{'status':<10}{'iters':>7}{'F evals':>9}  checks")
for cfg in (baseline("sd"), baseline("fr"), mmg_i1(5), mmg_i2(3)):
    trace = solve(scaled, x0, cfg)
    checks = []
    if not diagnostics.monotonicity_violations(trace):
        checks.append("monotone")
    if cfg.name.startswith("MMG") and not diagnostics.sufficient_descent_violations(trace):
        checks.append("sufficient descent")
    print(f"{cfg.name:<14}{trace.status.value:<10}{trace.iterations:>7}{trace.f_evals:>9}  {', '.join(checks)}")
