"""Bayesian optimization loop, experiment configuration, traces and AFO metrics."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .afo import AFO_STRATEGIES, AfoSettings, solve_afo
from .benchmarks import BENCHMARKS, Benchmark, make_benchmark
from .pbf import MAX_BRUTE_FORCE_DIM, BudgetExceededError, bitstring, codes_to_bits, from_alpha
from .psr import PsrParams
from .surrogate import gibbs_fit, thompson_draw

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("iteration", "x", "y", "best_so_far", "afo_time_ms", "afo_objective", "afo_lower_bound")
CONFIG_KEYS = ("benchmark", "n", "benchmark_params", "afo", "psr_params", "surrogate_params",
               "n_init", "n_iters", "lambda_reg", "seed", "output")
DEFAULT_LAMBDA = {"bqp": 0.001, "contamination": 0.0001, "ising": 0.0001, "labs": 0.0}
SURROGATE_KEYS = ("burn_in", "intercept_var")
AFO_EXTRA_KEYS = ("random_budget", "local_search_restarts")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str
    n: int
    benchmark_params: Dict = field(default_factory=dict)
    afo: str = "psr"
    psr_params: Dict = field(default_factory=dict)
    surrogate_params: Dict = field(default_factory=dict)
    n_init: int = 20
    n_iters: int = 250
    lambda_reg: Optional[float] = None
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"benchmark must be one of {BENCHMARKS}, got {self.benchmark!r}")
        if self.afo not in AFO_STRATEGIES:
            raise ConfigError(f"afo must be one of {AFO_STRATEGIES}, got {self.afo!r}")
        for name in ("n", "n_init", "n_iters"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
        if self.lambda_reg is not None and self.lambda_reg < 0:
            raise ConfigError("lambda_reg must be >= 0")
        unknown = set(self.surrogate_params) - set(SURROGATE_KEYS)
        if unknown:
            raise ConfigError(f"unknown surrogate_params: {sorted(unknown)}")
        try:
            self.afo_settings()
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad psr_params: {exc}") from exc

    @classmethod
    def from_dict(cls, d: Dict) -> "ExperimentConfig":
        unknown = set(d) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"benchmark", "n"} - set(d)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    def to_dict(self) -> Dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def effective_lambda(self) -> float:
        return DEFAULT_LAMBDA[self.benchmark] if self.lambda_reg is None else float(self.lambda_reg)

    @property
    def burn_in(self) -> int:
        return int(self.surrogate_params.get("burn_in", 500))

    @property
    def intercept_var(self) -> float:
        return float(self.surrogate_params.get("intercept_var", 100.0))

    def afo_settings(self) -> AfoSettings:
        params = dict(self.psr_params)
        extra = {k: params.pop(k) for k in AFO_EXTRA_KEYS if k in params}
        return AfoSettings(psr=PsrParams(**params), **extra)

    def make_benchmark(self) -> Benchmark:
        try:
            return make_benchmark(self.benchmark, self.n, self.benchmark_params,
                                  self.effective_lambda, self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad benchmark_params: {exc}") from exc


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    x: np.ndarray
    y: float
    best_so_far: float
    afo_time_ms: Optional[float] = None
    afo_objective: Optional[float] = None
    afo_lower_bound: Optional[float] = None


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    rows: List[TraceRow] = field(default_factory=list)

    @property
    def best(self) -> Tuple[np.ndarray, float]:
        k = int(np.argmin([r.y for r in self.rows]))
        return self.rows[k].x, self.rows[k].y

    @property
    def best_so_far(self) -> np.ndarray:
        return np.array([r.best_so_far for r in self.rows])

    @property
    def metadata(self) -> Dict:
        return {"config": self.config.to_dict(), "seed": self.config.seed}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r.iteration, bitstring(r.x), repr(r.y), repr(r.best_so_far),
                             _fmt(r.afo_time_ms), _fmt(r.afo_objective), _fmt(r.afo_lower_bound)])
        return buf.getvalue()

    def write(self, path) -> None:
        """Write the CSV trace and a ``.meta.json`` sidecar holding the config echo."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        path.with_suffix(path.suffix + ".meta.json").write_text(
            json.dumps(self.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))


def _child_seed(seed: int, *path: int) -> int:
    return int(np.random.SeedSequence([seed, *path]).generate_state(1)[0])


def run_bo(config: ExperimentConfig, objective: Optional[Benchmark] = None) -> ExperimentRecord:
    """Thompson-sampling BO with the configured acquisition optimizer.

    The surrogate is refit from scratch on all data every iteration; only the
    acquisition solve is timed.
    """
    bench = objective if objective is not None else config.make_benchmark()
    n = bench.dimension
    if n != config.n:
        raise ConfigError(f"benchmark dimension {n} does not match n={config.n}")
    settings = config.afo_settings()
    lam = config.effective_lambda
    record = ExperimentRecord(config)

    rng = np.random.default_rng(_child_seed(config.seed, 0))
    X0 = (rng.random((config.n_init, n)) < 0.5).astype(np.int8)
    data: List[Tuple[np.ndarray, float]] = []
    best = np.inf
    for x in X0:
        y = float(bench(x))
        best = min(best, y)
        data.append((x, y))
        record.rows.append(TraceRow(len(record.rows), x, y, best))

    for t in range(config.n_iters):
        state = gibbs_fit(data, config.burn_in, _child_seed(config.seed, 1, t), config.intercept_var)
        alpha = thompson_draw(state)
        f = from_alpha(alpha.alpha0, alpha.alpha_lin, alpha.alpha_quad, lam)
        start = time.perf_counter()
        res = solve_afo(config.afo, f, settings, _child_seed(config.seed, 2, t))
        elapsed_ms = 1000.0 * (time.perf_counter() - start)
        y = float(bench(res.x))
        best = min(best, y)
        data.append((res.x, y))
        record.rows.append(TraceRow(len(record.rows), res.x, y, best, elapsed_ms, res.value,
                                    res.lower_bound))
        logger.debug("iter %d: y=%.6g best=%.6g afo=%.3fms", t, y, best, elapsed_ms)
    return record


def random_search_inputs(objective: Benchmark, budget: int, seed: int = 0) -> np.ndarray:
    """Best-so-far trace of uniform random search directly on the objective."""
    rng = np.random.default_rng(_child_seed(seed, 0))
    X = (rng.random((budget, objective.dimension)) < 0.5).astype(np.int8)
    return np.minimum.accumulate(objective.evaluate_many(X))


def oracle(objective: Benchmark, chunk: int = 1 << 14) -> Tuple[np.ndarray, float]:
    """Exhaustive minimum of a benchmark; lexicographically smallest argmin."""
    n = objective.dimension
    if n > MAX_BRUTE_FORCE_DIM:
        raise BudgetExceededError(f"dimension {n} exceeds enumeration budget {MAX_BRUTE_FORCE_DIM}")
    best_code, best_val = 0, np.inf
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        vals = objective.evaluate_many(codes_to_bits(codes, n))
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_code, best_val = int(codes[k]), float(vals[k])
    x = codes_to_bits(np.array([best_code]), n)[0]
    return x, float(objective(x))


# -- AFO metrics ------------------------------------------------------------------

_PAIRED_FIELDS = ("benchmark", "n", "benchmark_params", "surrogate_params", "n_init", "n_iters",
                  "lambda_reg", "seed")


@dataclass(frozen=True)
class MetricsRow:
    n: int
    candidate: str
    baseline: str
    candidate_time_ms: float
    baseline_time_ms: float
    candidate_time_norm: float
    baseline_time_norm: float
    pct_improvement: float
    iterations: int


def percent_improvement(af_baseline: float, af_candidate: float, guard: float = 1e-12) -> Optional[float]:
    if abs(af_baseline) < guard:
        return None
    return 100.0 * (af_baseline - af_candidate) / abs(af_baseline)


def afo_metrics(pairs: Iterable[Tuple[ExperimentRecord, ExperimentRecord]]) -> List[MetricsRow]:
    """Mean AFO time and mean AF-objective improvement of candidate over baseline.

    Times are normalized by the candidate's mean AFO time at the smallest
    dimension present. Improvements are averaged over all acquisition
    iterations of all pairs at a dimension; iterations whose baseline value is
    (numerically) zero are skipped.
    """
    groups: Dict[Tuple[int, str, str], Dict[str, list]] = {}
    for cand, base in pairs:
        for name in _PAIRED_FIELDS:
            if getattr(cand.config, name) != getattr(base.config, name):
                raise ValueError(f"paired records differ in {name!r}")
        if len(cand.rows) != len(base.rows):
            raise ValueError("paired records have different lengths")
        g = groups.setdefault((cand.config.n, cand.config.afo, base.config.afo),
                              {"ct": [], "bt": [], "pct": []})
        for rc, rb in zip(cand.rows, base.rows):
            if rc.afo_time_ms is None or rb.afo_time_ms is None:
                continue
            g["ct"].append(rc.afo_time_ms)
            g["bt"].append(rb.afo_time_ms)
            p = percent_improvement(rb.afo_objective, rc.afo_objective)
            if p is not None:
                g["pct"].append(p)
    if not groups:
        return []
    n_min = min(k[0] for k in groups)
    base_time = {}
    for (n, cand, _), g in groups.items():
        if n == n_min:
            base_time.setdefault(cand, float(np.mean(g["ct"])))
    rows = []
    for (n, cand, base), g in sorted(groups.items()):
        ct, bt = float(np.mean(g["ct"])), float(np.mean(g["bt"]))
        ref = base_time.get(cand, np.nan)
        rows.append(MetricsRow(
            n=n, candidate=cand, baseline=base, candidate_time_ms=ct, baseline_time_ms=bt,
            candidate_time_norm=ct / ref, baseline_time_norm=bt / ref,
            pct_improvement=float(np.mean(g["pct"])) if g["pct"] else float("nan"),
            iterations=len(g["ct"]),
        ))
    return rows


def metrics_to_csv(rows: Sequence[MetricsRow]) -> str:
    buf = io.StringIO()
    names = [f.name for f in dataclasses.fields(MetricsRow)]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for r in rows:
        writer.writerow([getattr(r, k) for k in names])
    return buf.getvalue()


def afo_sweep(config: ExperimentConfig, dims: Sequence[int], strategies: Sequence[str],
              seeds: Sequence[int]) -> List[MetricsRow]:
    """Run BO for every (dimension, seed, strategy) and compare the first strategy to the rest."""
    if len(strategies) < 2:
        raise ConfigError("need a candidate and at least one baseline strategy")
    pairs = []
    for n in dims:
        for seed in seeds:
            records = {s: run_bo(config.replace(n=n, afo=s, seed=seed)) for s in strategies}
            cand = records[strategies[0]]
            pairs.extend((cand, records[s]) for s in strategies[1:])
    return afo_metrics(pairs)
