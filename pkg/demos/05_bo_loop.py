"""Bayesian optimization on BQP with PSR against random search over inputs."""
import numpy as np

from psrbo import ExperimentConfig, run_bo
from psrbo.driver import oracle, random_search_inputs

config = ExperimentConfig(benchmark="bqp", n=12, n_init=10, n_iters=30, lambda_reg=0.001,
                          surrogate_params={"burn_in": 200}, seed=0)
record = run_bo(config)
bench = config.make_benchmark()
baseline = random_search_inputs(bench, config.n_init + config.n_iters, seed=0)
_, v_opt = oracle(bench)

print(f"optimum            {v_opt:.4f}")
print(f"BO best-so-far     {record.best_so_far[-1]:.4f}")
print(f"random search best {baseline[-1]:.4f}")
print(f"mean AFO time      {np.mean([r.afo_time_ms for r in record.rows[config.n_init:]]):.2f} ms")
print(record.to_csv().splitlines()[0])
