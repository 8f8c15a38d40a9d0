"""Parametrized submodular relaxation for binary quadratic minimization.

The positive (non-submodular) interactions ``x^T A+ x`` are replaced by an
affine lower bound weighted by a matrix ``lam`` in ``[0, 1]^{n x n}``. What
remains is submodular and is minimized exactly with one min-cut. An outer
projected subgradient loop moves ``lam`` to raise the resulting lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np

from .flow import FlowNetwork, solve_min_cut
from .pbf import QuadraticPBF, SignSplit, as_bits, evaluate, sign_split

LAMBDA_INITS = ("half", "uniform-random")


class LinearForm(NamedTuple):
    weights: np.ndarray
    constant: float

    def __call__(self, x) -> float:
        return float(np.dot(self.weights, np.asarray(x, dtype=np.float64)) + self.constant)


@dataclass(frozen=True)
class PsrParams:
    max_outer_iters: int = 10
    step_size_0: float = 1.0
    tolerance: float = 1e-6
    lambda_init: str = "half"

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not self.step_size_0 > 0:
            raise ValueError("step_size_0 must be > 0")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        if self.lambda_init not in LAMBDA_INITS:
            raise ValueError(f"lambda_init must be one of {LAMBDA_INITS}")

    def step_size(self, i: int) -> float:
        return self.step_size_0 / np.sqrt(i + 1)


@dataclass(frozen=True)
class PsrResult:
    best_x: np.ndarray
    best_value: float
    best_lower_bound: float
    iterations_used: int
    bound_trace: List[float] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.best_value - self.best_lower_bound


def affine_lower_bound(split: SignSplit, lam) -> LinearForm:
    """Affine minorant of ``x^T A+ x``: ``x^T M 1 + 1^T M x - 1^T M 1`` with ``M = A+ * lam``."""
    M = split.a_plus * np.asarray(lam, dtype=np.float64)
    return LinearForm(M.sum(axis=1) + M.sum(axis=0), -float(M.sum()))


def relaxed_objective(f: QuadraticPBF, lam) -> Tuple[LinearForm, np.ndarray]:
    split = sign_split(f)
    h = affine_lower_bound(split, lam)
    return LinearForm(h.weights + f.b, h.constant + f.c), split.a_minus


def relaxed_value(h_total: LinearForm, a_minus: np.ndarray, x) -> float:
    bits = np.asarray(x).astype(bool)
    return h_total(bits) + float(a_minus[np.ix_(bits, bits)].sum())


def build_cut_network(h_total: LinearForm, a_minus) -> Tuple[FlowNetwork, float]:
    """Encode ``h_total(x) + x^T a_minus x`` as an s-t network.

    Node ``v_i`` lies on the sink side iff ``x_i = 1``. For every x, the cut
    induced by x plus the returned offset equals the energy at x.
    """
    a_minus = np.asarray(a_minus, dtype=np.float64)
    if np.any(a_minus > 0):
        raise ValueError("a_minus must be non-positive")
    n = a_minus.shape[0]
    unary = np.array(h_total.weights, dtype=np.float64) + np.diag(a_minus)
    offset = float(h_total.constant)
    net = FlowNetwork(n)

    # theta x_i x_j (theta <= 0) = theta x_i + |theta| x_i (1 - x_j); the second
    # term is paid when v_i is on the sink side and v_j on the source side
    theta = a_minus + a_minus.T
    iu, ju = np.nonzero(np.triu(theta, 1))
    for i, j in zip(iu.tolist(), ju.tolist()):
        w = theta[i, j]
        unary[i] += w
        net.add_edge(j, i, -w)

    for i in range(n):
        w = unary[i]
        if w > 0:
            net.add_edge(net.source, i, w)
        elif w < 0:
            net.add_edge(i, net.sink, -w)
            offset += w
    return net, offset


def solve_relaxation(f: QuadraticPBF, lam) -> Tuple[np.ndarray, float]:
    """Exact minimizer of the relaxed objective and its value.

    Among tied minimizers the one with the fewest ones is returned.
    """
    h_total, a_minus = relaxed_objective(f, lam)
    net, _ = build_cut_network(h_total, a_minus)
    cut = solve_min_cut(net)
    x = np.ones(f.dimension, dtype=np.int8)
    x[list(cut.maximal_source_side)] = 0
    return x, relaxed_value(h_total, a_minus, x)


def subgradient(split: SignSplit, x_hat) -> np.ndarray:
    """Subgradient of the negated relaxed minimum with respect to ``lam``."""
    x = np.asarray(x_hat, dtype=np.float64)
    return split.a_plus * (1.0 - x[:, None] - x[None, :])


def project_unit_box(m) -> np.ndarray:
    return np.clip(np.asarray(m, dtype=np.float64), 0.0, 1.0)


def initial_lambda(n: int, params: PsrParams, rng_seed: int = 0) -> np.ndarray:
    if params.lambda_init == "half":
        return np.full((n, n), 0.5)
    return np.random.default_rng(rng_seed).uniform(size=(n, n))


def psr_minimize(f: QuadraticPBF, params: PsrParams = PsrParams(), rng_seed: int = 0) -> PsrResult:
    """Minimize ``f`` by alternating min-cut solves and projected steps on ``lam``.

    Returns the inner solution with the lowest true objective together with the
    best lower bound seen. Stops after ``params.max_outer_iters`` solves, when
    the projected step moves ``lam`` by at most ``params.tolerance`` in any
    entry, or when the bound meets the best true value (the answer is then
    provably optimal).
    """
    n = f.dimension
    split = sign_split(f)
    lam = initial_lambda(n, params, rng_seed)

    best_x, best_value = np.zeros(n, dtype=np.int8), np.inf
    best_lb = -np.inf
    trace: List[float] = []
    for i in range(params.max_outer_iters):
        x_hat, lb = solve_relaxation(f, lam)
        trace.append(lb)
        value = evaluate(f, x_hat)
        if value < best_value:
            best_x, best_value = x_hat, value
        best_lb = max(best_lb, lb)
        if best_value - best_lb <= params.tolerance:
            break
        new_lam = project_unit_box(lam - params.step_size(i) * subgradient(split, x_hat))
        # a fixed point of the projected step repeats the same cut forever
        if np.max(np.abs(new_lam - lam), initial=0.0) <= params.tolerance:
            break
        lam = new_lam

    return PsrResult(
        best_x=as_bits(best_x, n),
        best_value=best_value,
        best_lower_bound=float(best_lb),
        iterations_used=len(trace),
        bound_trace=trace,
    )
