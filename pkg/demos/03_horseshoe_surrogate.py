"""Fit the horseshoe surrogate to a sparse quadratic and draw a Thompson sample."""
import numpy as np

from psrbo import gibbs_fit, thompson_draw
from psrbo.surrogate import feature_matrix, num_features

rng = np.random.default_rng(2)
n = 6
true = np.zeros(num_features(n))
true[[2, 9, 15]] = [3.0, -2.5, 4.0]
X = rng.integers(0, 2, size=(80, n))
y = feature_matrix(X) @ true + 0.01 * rng.standard_normal(80)

state = gibbs_fit(list(zip(X, y)), burn_in=500, seed=0)
samples = []
for _ in range(300):
    state.sweep()
    samples.append(state.coefficients)
mean = np.mean(samples, axis=0)
print("true nonzeros     :", true[[2, 9, 15]])
print("posterior mean    :", np.round(mean[[2, 9, 15]], 3))
print("largest other coef:", np.round(np.abs(np.delete(mean, [2, 9, 15])).max(), 4))

alpha = thompson_draw(state)
print("Thompson draw linear terms:", np.round(alpha.alpha_lin, 3))
