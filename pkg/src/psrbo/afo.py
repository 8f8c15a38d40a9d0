"""Acquisition-function optimizers: PSR plus exhaustive, random and local-search baselines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .pbf import QuadraticPBF, brute_force_minimize, codes_to_bits, evaluate
from .psr import PsrParams, psr_minimize

AFO_STRATEGIES = ("psr", "exhaustive", "random", "local-search")


def local_search_afo(f: QuadraticPBF, restarts: int = 20, seed: int = 0) -> Tuple[np.ndarray, float]:
    """Steepest-descent single-bit-flip search from ``restarts`` random starts."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    n = f.dimension
    A2 = 2.0 * f.A
    best_x, best_val = None, np.inf
    for _ in range(restarts):
        x = (rng.random(n) < 0.5).astype(np.float64)
        field = f.b + A2 @ x
        while True:
            # flip gain: f(x ^ e_i) - f(x)
            delta = (1.0 - 2.0 * x) * field
            i = int(np.argmin(delta))
            if delta[i] >= -1e-12:
                break
            step = 1.0 - 2.0 * x[i]
            x[i] += step
            field += A2[:, i] * step
        bits = x.astype(np.int8)
        val = evaluate(f, bits)
        if val < best_val:
            best_x, best_val = bits, val
    return best_x, best_val


def random_search_afo(f: QuadraticPBF, budget: int = 100, seed: int = 0,
                      stream: str = "uniform") -> Tuple[np.ndarray, float]:
    """Best of ``budget`` points.

    With ``stream="uniform"`` the points are seeded uniform draws and a larger
    budget extends the same sequence. ``stream="enumerate"`` walks {0,1}^n in
    lexicographic order instead.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    n = f.dimension
    if stream == "uniform":
        X = (np.random.default_rng(seed).random((budget, n)) < 0.5).astype(np.int8)
    elif stream == "enumerate":
        X = codes_to_bits(np.arange(budget, dtype=np.int64) % (1 << n), n)
    else:
        raise ValueError(f"unknown stream {stream!r}")
    vals = f.evaluate_many(X)
    k = int(np.argmin(vals))
    return X[k], evaluate(f, X[k])


@dataclass(frozen=True)
class AfoResult:
    x: np.ndarray
    value: float
    lower_bound: Optional[float] = None


@dataclass(frozen=True)
class AfoSettings:
    psr: PsrParams = PsrParams()
    random_budget: int = 100
    local_search_restarts: int = 20


def solve_afo(strategy: str, f: QuadraticPBF, settings: AfoSettings = AfoSettings(),
              seed: int = 0) -> AfoResult:
    if strategy == "psr":
        r = psr_minimize(f, settings.psr, seed)
        return AfoResult(r.best_x, r.best_value, r.best_lower_bound)
    if strategy == "exhaustive":
        x, v = brute_force_minimize(f)
        return AfoResult(x, v)
    if strategy == "random":
        x, v = random_search_afo(f, settings.random_budget, seed)
        return AfoResult(x, v)
    if strategy == "local-search":
        x, v = local_search_afo(f, settings.local_search_restarts, seed)
        return AfoResult(x, v)
    raise ValueError(f"unknown AFO strategy {strategy!r}; expected one of {AFO_STRATEGIES}")
