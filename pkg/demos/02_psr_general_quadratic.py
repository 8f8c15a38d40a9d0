"""Run the parametrized submodular relaxation on a non-submodular quadratic.

The best lower bound and best feasible value bracket the true minimum.
"""
import numpy as np

from psrbo import PsrParams, QuadraticPBF, brute_force_minimize, psr_minimize

rng = np.random.default_rng(1)
n = 14
A = rng.normal(size=(n, n))
f = QuadraticPBF(A + A.T, rng.normal(size=n), 0.0)

result = psr_minimize(f, PsrParams(max_outer_iters=10))
_, v_opt = brute_force_minimize(f)

print("bound trace:", np.round(result.bound_trace, 4))
print(f"lower bound {result.best_lower_bound:.4f} <= optimum {v_opt:.4f} <= found {result.best_value:.4f}")
print(f"iterations used: {result.iterations_used}, gap {result.gap:.4f}")
