"""Evaluate each benchmark and find its exact optimum by enumeration."""
from psrbo import make_benchmark
from psrbo.driver import DEFAULT_LAMBDA, oracle

for name, n, params in [("bqp", 10, {"alpha_corr": 1.0}), ("contamination", 10, {}),
                        ("ising", 12, {}), ("labs", 10, {})]:
    bench = make_benchmark(name, n, params, lambda_reg=DEFAULT_LAMBDA[name], seed=0)
    x, value = oracle(bench)
    print(f"{name:13s} n={n:2d}  optimum {value:9.4f}  at {''.join(map(str, x))}")
