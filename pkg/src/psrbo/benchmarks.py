"""Black-box test objectives over {0,1}^n, all in minimization form.

Every instance is fully determined by its parameters and seed; objectives are
pure functions of ``(instance, x)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .pbf import as_bits

MAX_ISING_NODES = 16


class Benchmark:
    """Common interface: ``dimension``, ``__call__(x)`` and batch evaluation."""

    dimension: int

    def __call__(self, x) -> float:
        raise NotImplementedError

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        return np.array([self(x) for x in X])


# -- binary quadratic programming ---------------------------------------------


def correlation_kernel(n: int, alpha_corr: float) -> np.ndarray:
    idx = np.arange(n)
    return np.exp(-((idx[:, None] - idx[None, :]) ** 2) / alpha_corr ** 2)


@dataclass(frozen=True, eq=False)
class BqpInstance(Benchmark):
    n: int
    lambda_reg: float = 0.001
    alpha_corr: float = 1.0
    seed: int = 0
    Q: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.alpha_corr <= 0 or self.lambda_reg < 0:
            raise ValueError("need n >= 1, alpha_corr > 0, lambda_reg >= 0")
        M = np.random.default_rng(self.seed).standard_normal((self.n, self.n))
        object.__setattr__(self, "Q", M * correlation_kernel(self.n, self.alpha_corr))

    @property
    def dimension(self) -> int:
        return self.n

    def __call__(self, x) -> float:
        return bqp_objective(self, x)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return -(np.einsum("ki,ki->k", X @ self.Q, X) - self.lambda_reg * X.sum(axis=1))


def bqp_objective(inst: BqpInstance, x) -> float:
    x = as_bits(x, inst.n).astype(np.float64)
    return float(-(x @ inst.Q @ x - inst.lambda_reg * x.sum()))


# -- contamination control ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class ContaminationInstance(Benchmark):
    """Food-chain contamination with presampled rates (common random numbers).

    Defaults follow the reference BOCS setup: initial contamination
    Beta(1, 30), spread rates Beta(1, 17/3), restoration rates Beta(1, 3/7),
    limits 0.1, unit costs.
    """

    n: int
    lambda_reg: float = 0.0001
    rho: float = 1.0
    n_samples: int = 100
    epsilon: float = 0.05
    upper_limit: float = 0.1
    cost: float = 1.0
    seed: int = 0
    init_beta: Tuple[float, float] = (1.0, 30.0)
    spread_beta: Tuple[float, float] = (1.0, 17.0 / 3.0)
    restore_beta: Tuple[float, float] = (1.0, 3.0 / 7.0)
    initial: np.ndarray = field(init=False, repr=False)
    spread_rates: np.ndarray = field(init=False, repr=False)
    restore_rates: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.n_samples < 1:
            raise ValueError("need n >= 1 and n_samples >= 1")
        rng = np.random.default_rng(self.seed)
        T = self.n_samples
        object.__setattr__(self, "initial", rng.beta(*self.init_beta, size=T))
        object.__setattr__(self, "spread_rates", rng.beta(*self.spread_beta, size=(T, self.n)))
        object.__setattr__(self, "restore_rates", rng.beta(*self.restore_beta, size=(T, self.n)))

    @property
    def dimension(self) -> int:
        return self.n

    @property
    def costs(self) -> np.ndarray:
        return np.full(self.n, self.cost)

    @property
    def limits(self) -> np.ndarray:
        return np.full(self.n, self.upper_limit)

    def trajectories(self, x) -> np.ndarray:
        """Contamination fractions, shape (n_samples, n)."""
        x = as_bits(x, self.n).astype(np.float64)
        Z = np.empty((self.n_samples, self.n))
        prev = self.initial
        for i in range(self.n):
            prev = (self.spread_rates[:, i] * (1.0 - x[i]) * (1.0 - prev)
                    + (1.0 - self.restore_rates[:, i] * x[i]) * prev)
            Z[:, i] = prev
        return Z

    def __call__(self, x) -> float:
        return contamination_objective(self, x)


def contamination_objective(inst: ContaminationInstance, x) -> float:
    x = as_bits(x, inst.n)
    Z = inst.trajectories(x)
    violations = np.sum(Z > inst.limits[None, :])
    return float(inst.costs @ x + inst.rho / inst.n_samples * violations + inst.lambda_reg * x.sum())


# -- sparsification of Ising models --------------------------------------------


def grid_edges(rows: int, cols: int) -> list:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return edges


def _spin_states(m: int) -> np.ndarray:
    return np.array(list(itertools.product((-1, 1), repeat=m)), dtype=np.float64)


@dataclass(frozen=True, eq=False)
class IsingInstance(Benchmark):
    """Zero-field Ising model ``p(z) ~ exp(sum_{(i,j) in E} J_ij z_i z_j)``.

    The decision vector selects which edges keep their coupling in the
    approximating model ``q``.
    """

    node_count: int
    edges: Tuple[Tuple[int, int], ...]
    couplings: np.ndarray
    lambda_reg: float = 0.0001
    log_Zp: float = field(init=False)
    moments: np.ndarray = field(init=False, repr=False)
    _pair_products: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.node_count <= MAX_ISING_NODES:
            raise ValueError(f"node_count must be in [1, {MAX_ISING_NODES}]")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        J = np.asarray(self.couplings, dtype=np.float64).reshape(-1)
        if len(J) != len(edges) or not edges:
            raise ValueError("need one coupling per edge and at least one edge")
        for i, j in edges:
            if not (0 <= i < self.node_count and 0 <= j < self.node_count and i != j):
                raise ValueError(f"bad edge ({i}, {j})")
        S = _spin_states(self.node_count)
        ii = np.array([e[0] for e in edges])
        jj = np.array([e[1] for e in edges])
        prods = S[:, ii] * S[:, jj]
        energy = prods @ J
        shift = energy.max()
        w = np.exp(energy - shift)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "_pair_products", prods)
        object.__setattr__(self, "log_Zp", float(np.log(w.sum()) + shift))
        object.__setattr__(self, "moments", (w @ prods) / w.sum())

    @classmethod
    def grid(cls, rows: int = 3, cols: int = 3, seed: int = 0, low: float = 0.05,
             high: float = 5.0, lambda_reg: float = 0.0001) -> "IsingInstance":
        edges = grid_edges(rows, cols)
        J = np.random.default_rng(seed).uniform(low, high, size=len(edges))
        return cls(rows * cols, tuple(edges), J, lambda_reg)

    @property
    def dimension(self) -> int:
        return len(self.edges)

    @property
    def Z_p(self) -> float:
        return float(np.exp(self.log_Zp))

    def log_partition(self, couplings) -> float:
        energy = self._pair_products @ np.asarray(couplings, dtype=np.float64)
        shift = energy.max()
        return float(np.log(np.exp(energy - shift).sum()) + shift)

    def kl_divergence(self, x) -> float:
        x = as_bits(x, self.dimension)
        Jq = x * self.couplings
        return float((self.couplings - Jq) @ self.moments + self.log_partition(Jq) - self.log_Zp)

    def __call__(self, x) -> float:
        return ising_objective(self, x)


def ising_objective(inst: IsingInstance, x) -> float:
    x = as_bits(x, inst.dimension)
    return inst.kl_divergence(x) + inst.lambda_reg * float(x.sum())


# -- low autocorrelation binary sequences --------------------------------------


@dataclass(frozen=True)
class LabsInstance(Benchmark):
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("LABS needs n >= 2")

    @property
    def dimension(self) -> int:
        return self.n

    def __call__(self, x) -> float:
        return labs_objective(self, x)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        S = 2.0 * np.asarray(X, dtype=np.float64) - 1.0
        E = sum((np.einsum("ki,ki->k", S[:, :-k], S[:, k:])) ** 2 for k in range(1, self.n))
        return -(self.n ** 2) / E


def autocorrelation_energy(s: Sequence[float]) -> float:
    s = np.asarray(s, dtype=np.float64)
    return float(sum(np.dot(s[:-k], s[k:]) ** 2 for k in range(1, len(s))))


def labs_objective(inst: LabsInstance, x) -> float:
    """Negative merit factor ``-n^2 / E(S)`` with ``s_i = 2 x_i - 1``."""
    s = 2.0 * as_bits(x, inst.n) - 1.0
    return -(inst.n ** 2) / autocorrelation_energy(s)


# -- construction from config ---------------------------------------------------

BENCHMARKS = ("bqp", "contamination", "ising", "labs")


def make_benchmark(name: str, n: int, params: dict, lambda_reg: float, seed: int) -> Benchmark:
    """Build a benchmark instance from experiment-config fields."""
    params = dict(params)
    if name == "bqp":
        return BqpInstance(n, lambda_reg=lambda_reg, seed=params.pop("seed", seed), **params)
    if name == "contamination":
        return ContaminationInstance(n, lambda_reg=lambda_reg, seed=params.pop("seed", seed), **params)
    if name == "ising":
        rows = params.pop("rows", 3)
        cols = params.pop("cols", 3)
        inst = IsingInstance.grid(rows, cols, seed=params.pop("seed", seed), lambda_reg=lambda_reg,
                                  **params)
        if inst.dimension != n:
            raise ValueError(f"a {rows}x{cols} Ising grid has {inst.dimension} edges, config says n={n}")
        return inst
    if name == "labs":
        if params:
            raise TypeError(f"unexpected LABS parameters: {sorted(params)}")
        return LabsInstance(n)
    raise ValueError(f"unknown benchmark {name!r}; expected one of {BENCHMARKS}")
