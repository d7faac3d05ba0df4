"""Fisher market equilibrium as convex minimization.

A linear Fisher market (50 unit-budget buyers, 5 goods, utilities uniform on
[2, 8]) is solved by minimizing its convex potential over the product of
per-buyer simplices.  The potential is smooth relative to the negative
entropy (constant 1) but not Lipschitz-smooth in any norm, which is exactly
the regime the adaptive solver is built for.

Compares adaptive mirror descent against entropic gradient descent with an
untuned step (0.1) and against proportional response, the specialist fixed
point iteration for this problem class.
"""

import numpy as np

from bregopt import (SolverSpec, fisher_problem, fit_rate, make_random_market,
                     run)

mkt = make_random_market(50, 5, 2, 8, seed=1)
print(f"market: {mkt.n} buyers x {mkt.m} goods, utilities in [2, 8]")

problem = fisher_problem(mkt)   # reference optimum via proportional response
print(f"reference optimum value: {problem.f_star:.12f}")
print(f"relative-smoothness certificate: L = {problem.rs_constant}")

T = 5000
traces = {
    "adamir": run(SolverSpec("adamir", T), problem),
    "egd(0.1)": run(SolverSpec("egd", T, gamma=0.1), problem),
    "pr": run(SolverSpec("pr", T), problem),
}

print(f"\noptimality gaps (f - min f), all solvers from the barycenter, T={T}:")
print(f"{'iteration':>10s}" + "".join(f"{name:>16s}" for name in traces))
for t in (10, 100, 1000, 5000):
    row = f"{t:>10d}"
    for trace in traces.values():
        row += f"{trace.value_at(t, 'f_last') - problem.f_star:>16.3e}"
    print(row)

print("\nergodic-average gaps:")
for t in (10, 100, 1000, 5000):
    row = f"{t:>10d}"
    for trace in traces.values():
        row += f"{trace.value_at(t, 'f_avg') - problem.f_star:>16.3e}"
    print(row)

fit = fit_rate(traces["adamir"], "f_avg_gap", window=(100, T))
print(f"\nadaptive solver ergodic rate: gap ~ t^{fit.slope:.2f} "
      f"(r^2 = {fit.r_squared:.4f}); the relative-smoothness guarantee is t^-1")

gammas = traces["adamir"].column("gamma")
print(f"adaptive step: gamma_1 = {gammas[0]:.3g} -> gamma_{T} = {gammas[-1]:.6f}")
print("the step stabilizes at a positive limit instead of decaying to zero,")
print("so the method is not slowed down near the solution")

div = traces["adamir"].column("div_to_opt")
print(f"\nlast-iterate divergence to the equilibrium: "
      f"D@100 = {traces['adamir'].value_at(100, 'div_to_opt'):.3e}, "
      f"D@5000 = {div[-1]:.3e}")
