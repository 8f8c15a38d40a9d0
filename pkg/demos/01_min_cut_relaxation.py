"""Minimize a submodular quadratic with one min-cut and compare against enumeration."""
import numpy as np

from psrbo import QuadraticPBF, brute_force_minimize, solve_min_cut
from psrbo.psr import build_cut_network, relaxed_objective, solve_relaxation

rng = np.random.default_rng(0)
n = 8
A = -np.abs(rng.normal(size=(n, n)))
f = QuadraticPBF(A + A.T, rng.normal(size=n), 0.0)

# With no positive couplings the relaxation is the function itself
lam = np.full((n, n), 0.5)
h, a_minus = relaxed_objective(f, lam)
net, offset = build_cut_network(h, a_minus)
cut = solve_min_cut(net)
print(f"cut value {cut.cut_value:.6f} + offset {offset:.6f} = {cut.cut_value + offset:.6f}")

x, value = solve_relaxation(f, lam)
x_opt, v_opt = brute_force_minimize(f)
print("min-cut minimizer:", x, f"value {value:.6f}")
print("enumeration      :", x_opt, f"value {v_opt:.6f}")
