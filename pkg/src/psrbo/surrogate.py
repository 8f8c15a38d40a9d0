"""Sparse Bayesian second-order regression with a horseshoe prior.

Model::

    y = phi(x)^T alpha + eps,        eps ~ N(0, sigma2)
    alpha_0 ~ N(0, intercept_var)
    alpha_k ~ N(0, sigma2 * tau2 * lambda2_k)       k >= 1
    lambda_k, tau ~ half-Cauchy(0, 1),  p(sigma2) ~ 1 / sigma2

Each half-Cauchy scale is written as a pair of inverse-gamma variables
(``lambda2_k | nu_k`` and ``nu_k``; ``tau2 | xi`` and ``xi``) so every full
conditional has closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
import scipy.linalg

from .pbf import as_bits

# joint coefficient draws switch to coordinate updates past this many features
# when the data system is not cheaper either
MAX_JOINT_FEATURES = 2000


def num_features(n: int) -> int:
    return 1 + n + n * (n - 1) // 2


def feature_map(x) -> np.ndarray:
    """Monomial features ``[1, x_1..x_n, x_1x_2, x_1x_3, ..., x_{n-1}x_n]``."""
    x = as_bits(x).astype(np.float64)
    iu, ju = np.triu_indices(x.shape[0], 1)
    return np.concatenate(([1.0], x, x[iu] * x[ju]))


def feature_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    iu, ju = np.triu_indices(X.shape[1], 1)
    return np.hstack([np.ones((X.shape[0], 1)), X, X[:, iu] * X[:, ju]])


@dataclass(frozen=True)
class AlphaSample:
    alpha0: float
    alpha_lin: np.ndarray
    alpha_quad: Dict[Tuple[int, int], float]


def unpack_alpha(coefficients, n: int) -> AlphaSample:
    coefficients = np.asarray(coefficients, dtype=np.float64)
    if coefficients.shape != (num_features(n),):
        raise ValueError(f"expected {num_features(n)} coefficients for n={n}")
    iu, ju = np.triu_indices(n, 1)
    quad = {(int(i), int(j)): float(a) for i, j, a in zip(iu, ju, coefficients[1 + n:])}
    return AlphaSample(float(coefficients[0]), coefficients[1:1 + n].copy(), quad)


def _inv_gamma(rng: np.random.Generator, shape, scale):
    return scale / rng.gamma(shape)


def _inv_exponential(rng: np.random.Generator, scale):
    return scale / rng.exponential(size=np.shape(scale))


class GibbsState:
    """Chain state of the horseshoe sampler.

    ``coefficients`` are on the scale of the original targets; internally the
    chain runs on mean-centred targets and the mean is added to the intercept.
    """

    def __init__(self, features: np.ndarray, targets: np.ndarray, seed: int,
                 intercept_var: float = 100.0):
        self.features = features
        self.y_shift = float(np.mean(targets))
        self.y = targets - self.y_shift
        self.intercept_var = float(intercept_var)
        # noiseless quadratic targets drive sigma2 toward 0 when N < p; the
        # floor keeps the linear systems solvable and is far below any real noise
        self.sigma2_floor = 1e-10 * max(float(np.var(self.y)), 1.0)
        self.rng = np.random.default_rng(seed)
        N, p = features.shape
        self._gram = features.T @ features
        self._Xty = features.T @ self.y
        self.beta = np.zeros(p)
        self.sigma2 = 1.0
        self.lambda2 = self.rng.uniform(size=p - 1) + 1e-3
        self.tau2 = 1.0
        self.nu = np.ones(p - 1)
        self.xi = 1.0

    @property
    def dimension(self) -> int:
        p = self.features.shape[1]
        return int(round((-1 + np.sqrt(1 + 8 * (p - 1))) / 2))

    @property
    def coefficients(self) -> np.ndarray:
        c = self.beta.copy()
        c[0] += self.y_shift
        return c

    @property
    def local_scales(self) -> np.ndarray:
        return np.sqrt(self.lambda2)

    @property
    def global_scale(self) -> float:
        return float(np.sqrt(self.tau2))

    def prior_variances(self) -> np.ndarray:
        return np.concatenate(([self.intercept_var], self.sigma2 * self.tau2 * self.lambda2))

    def sweep(self) -> None:
        """One full pass over all conditionals."""
        rng = self.rng
        self.beta = self._draw_coefficients()
        b = self.beta[1:]
        q = len(b)
        N = len(self.y)

        resid = self.y - self.features @ self.beta
        shrunk = np.sum(b ** 2 / self.lambda2) / self.tau2
        self.sigma2 = max(_inv_gamma(rng, (N + q) / 2.0, (resid @ resid + shrunk) / 2.0),
                          self.sigma2_floor)

        self.lambda2 = _inv_exponential(rng, 1.0 / self.nu + b ** 2 / (2.0 * self.tau2 * self.sigma2))
        self.tau2 = _inv_gamma(
            rng, (q + 1) / 2.0, 1.0 / self.xi + np.sum(b ** 2 / self.lambda2) / (2.0 * self.sigma2)
        )
        self.nu = _inv_exponential(rng, 1.0 + 1.0 / self.lambda2)
        self.xi = float(_inv_exponential(rng, 1.0 + 1.0 / self.tau2))
        tiny = np.finfo(np.float64).tiny
        self.lambda2 = np.maximum(self.lambda2, tiny)
        self.tau2 = max(self.tau2, tiny)
        self.sigma2 = max(self.sigma2, self.sigma2_floor)

    def _draw_coefficients(self) -> np.ndarray:
        N, p = self.features.shape
        d = self.prior_variances()
        if N < p:
            return self._draw_via_data_system(d)
        if p <= MAX_JOINT_FEATURES:
            return self._draw_via_precision(d)
        return self._draw_coordinatewise(d)

    def _draw_via_precision(self, d: np.ndarray) -> np.ndarray:
        # N(mu, P^-1) with P = X^T X / s2 + D^-1, mu = P^-1 X^T y / s2
        P = self._gram / self.sigma2 + np.diag(1.0 / d)
        try:
            L = np.linalg.cholesky(P)
        except np.linalg.LinAlgError:
            P = 0.5 * (P + P.T)
            L = np.linalg.cholesky(P + 1e-10 * np.trace(P) / len(P) * np.eye(len(P)))
        v = scipy.linalg.solve_triangular(L, self._Xty / self.sigma2, lower=True)
        mean = scipy.linalg.solve_triangular(L.T, v, lower=False)
        z = scipy.linalg.solve_triangular(L.T, self.rng.standard_normal(len(P)), lower=False)
        return mean + z

    def _draw_via_data_system(self, d: np.ndarray) -> np.ndarray:
        # exact draw through an N x N system when there are fewer rows than
        # features; written without dividing by sigma so sigma2 -> 0 (an
        # interpolating fit) stays well conditioned
        X = self.features
        N, p = X.shape
        u = self.rng.standard_normal(p) * np.sqrt(d)
        delta = self.rng.standard_normal(N)
        DXt = X.T * d[:, None]
        G = X @ DXt
        rhs = self.y - X @ u - np.sqrt(self.sigma2) * delta
        K = G + self.sigma2 * np.eye(N)
        try:
            L = np.linalg.cholesky(K)
            well_posed = np.min(np.diag(L)) ** 2 > 1e-12 * np.max(np.diag(K))
        except np.linalg.LinAlgError:
            well_posed = False
        if well_posed:
            w = scipy.linalg.cho_solve((L, True), rhs, check_finite=False)
        else:
            evals, evecs = scipy.linalg.eigh(G, driver="evd", check_finite=False)
            w = evecs @ ((evecs.T @ rhs) / (np.maximum(evals, 0.0) + self.sigma2))
        return u + DXt @ w

    def _draw_coordinatewise(self, d: np.ndarray) -> np.ndarray:
        beta = self.beta.copy()
        X = self.features
        resid = self.y - X @ beta
        col_sq = np.diag(self._gram)
        for k in range(len(beta)):
            xk = X[:, k]
            resid += xk * beta[k]
            prec = col_sq[k] / self.sigma2 + 1.0 / d[k]
            mean = (xk @ resid) / self.sigma2 / prec
            beta[k] = mean + self.rng.standard_normal() / np.sqrt(prec)
            resid -= xk * beta[k]
        return beta


def gibbs_fit(data: Sequence[Tuple[np.ndarray, float]], burn_in: int = 500, seed: int = 0,
              intercept_var: float = 100.0) -> GibbsState:
    """Run ``burn_in`` sweeps on ``data`` (pairs of bit vector and target)."""
    if len(data) == 0:
        raise ValueError("data must be non-empty")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    xs = [as_bits(x) for x, _ in data]
    n = xs[0].shape[0]
    if any(x.shape[0] != n for x in xs):
        raise ValueError("all inputs must have the same dimension")
    y = np.array([float(v) for _, v in data])
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    state = GibbsState(feature_matrix(np.array(xs)), y, seed, intercept_var)
    for _ in range(burn_in):
        state.sweep()
    return state


def thompson_draw(state: GibbsState) -> AlphaSample:
    """Advance the chain by one sweep and return its coefficients."""
    state.sweep()
    return unpack_alpha(state.coefficients, state.dimension)
