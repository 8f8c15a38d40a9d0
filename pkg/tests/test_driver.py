import csv
import io
import json

import numpy as np
import pytest

import psrbo.driver as driver
from psrbo.afo import AfoSettings, local_search_afo, random_search_afo, solve_afo
from psrbo.benchmarks import BqpInstance, LabsInstance
from psrbo.cli import main
from psrbo.driver import (
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    TraceRow,
    afo_metrics,
    oracle,
    percent_improvement,
    random_search_inputs,
    run_bo,
)
from psrbo.pbf import QuadraticPBF, all_bits, brute_force_minimize, evaluate


def random_pbf(rng, n, submodular=False):
    A = rng.normal(size=(n, n))
    A = A + A.T
    if submodular:
        A = -np.abs(A)
    return QuadraticPBF(A, rng.normal(size=n), rng.normal())


def small_config(**kw):
    base = dict(benchmark="bqp", n=6, n_init=5, n_iters=4, seed=1,
                surrogate_params={"burn_in": 20})
    base.update(kw)
    return ExperimentConfig(**base)


class TestLocalSearch:
    def test_local_optimality_certificate(self):
        f = random_pbf(np.random.default_rng(0), 12, submodular=True)
        x, v = local_search_afo(f, restarts=20, seed=0)
        assert v == evaluate(f, x)
        for i in range(12):
            y = x.copy()
            y[i] ^= 1
            assert v <= evaluate(f, y) + 1e-12

    def test_finds_optimum_usually(self):
        rng = np.random.default_rng(1)
        hits = 0
        for _ in range(20):
            f = random_pbf(rng, 10)
            _, v = local_search_afo(f, restarts=50, seed=0)
            hits += v <= brute_force_minimize(f)[1] + 1e-9
        assert hits >= 18

    def test_deterministic(self):
        f = random_pbf(np.random.default_rng(2), 10)
        a, b = local_search_afo(f, 1, seed=4), local_search_afo(f, 1, seed=4)
        np.testing.assert_array_equal(a[0], b[0])
        assert a[1] == b[1]

    def test_restarts_validated(self):
        with pytest.raises(ValueError):
            local_search_afo(QuadraticPBF.zero(3), restarts=0)


class TestRandomSearch:
    def test_budget_one(self):
        f = random_pbf(np.random.default_rng(3), 8)
        x, v = random_search_afo(f, budget=1, seed=5)
        expected = (np.random.default_rng(5).random((1, 8)) < 0.5).astype(int)[0]
        np.testing.assert_array_equal(x, expected)
        assert v == evaluate(f, expected)

    def test_monotone_in_budget(self):
        f = random_pbf(np.random.default_rng(4), 10)
        values = [random_search_afo(f, budget=k, seed=9)[1] for k in (1, 5, 20, 100, 500)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_exhaustive_stream(self):
        f = random_pbf(np.random.default_rng(5), 8)
        _, v = random_search_afo(f, budget=256, seed=0, stream="enumerate")
        assert v == brute_force_minimize(f)[1]


class TestSolveAfo:
    @pytest.mark.parametrize("strategy", ["psr", "exhaustive", "random", "local-search"])
    def test_value_is_true_objective(self, strategy):
        f = random_pbf(np.random.default_rng(6), 9)
        r = solve_afo(strategy, f, AfoSettings(), seed=0)
        assert r.value == evaluate(f, r.x)
        assert (r.lower_bound is not None) == (strategy == "psr")

    def test_unknown(self):
        with pytest.raises(ValueError):
            solve_afo("sdp", QuadraticPBF.zero(2))


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = small_config()
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.from_json(path) == cfg

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            ExperimentConfig.from_dict({"benchmark": "bqp", "n": 4, "budget": 3})

    def test_missing_key(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"benchmark": "bqp"})

    @pytest.mark.parametrize("bad", [dict(benchmark="tsp"), dict(afo="sdp"), dict(n_init=0),
                                     dict(n_iters=0), dict(lambda_reg=-1.0),
                                     dict(psr_params={"max_outer_iters": 0}),
                                     dict(psr_params={"bogus": 1}),
                                     dict(surrogate_params={"chains": 2})])
    def test_validation(self, bad):
        with pytest.raises(ConfigError):
            small_config(**bad)

    def test_benchmark_params_validated(self):
        with pytest.raises(ConfigError):
            small_config(benchmark_params={"colour": 1}).make_benchmark()

    def test_default_lambda(self):
        assert small_config().effective_lambda == 0.001
        assert small_config(benchmark="labs").effective_lambda == 0.0
        assert small_config(benchmark="contamination").effective_lambda == 0.0001

    def test_afo_extras(self):
        s = small_config(psr_params={"random_budget": 7, "max_outer_iters": 3}).afo_settings()
        assert s.random_budget == 7 and s.psr.max_outer_iters == 3


class TestRunBo:
    @pytest.mark.parametrize("afo", ["psr", "exhaustive", "random", "local-search"])
    def test_record_shape(self, afo):
        cfg = small_config(afo=afo)
        rec = run_bo(cfg)
        assert len(rec.rows) == cfg.n_init + cfg.n_iters
        assert np.all(np.diff(rec.best_so_far) <= 0)
        assert [r.iteration for r in rec.rows] == list(range(len(rec.rows)))
        x, y = rec.best
        assert y == rec.best_so_far[-1] == BqpInstance(6, seed=1)(x)

    def test_exhaustive_reports_true_afo_minimum(self, monkeypatch):
        seen = []
        real = driver.solve_afo

        def spy(strategy, f, settings, seed):
            res = real(strategy, f, settings, seed)
            seen.append((f, res))
            return res

        monkeypatch.setattr(driver, "solve_afo", spy)
        rec = run_bo(small_config(afo="exhaustive", n=8))
        for (f, res), row in zip(seen, rec.rows[5:]):
            assert row.afo_objective == brute_force_minimize(f)[1]
            assert row.afo_lower_bound is None

    def test_psr_bound_below_afo_objective(self):
        rec = run_bo(small_config(afo="psr", n=10, n_iters=6))
        for row in rec.rows[5:]:
            assert row.afo_lower_bound <= row.afo_objective + 1e-9

    def test_reproducible_csv(self):
        a = run_bo(small_config(afo="psr")).to_csv()
        b = run_bo(small_config(afo="psr")).to_csv()

        def strip_time(text):
            rows = list(csv.reader(io.StringIO(text)))
            return [r[:4] + r[5:] for r in rows]

        assert strip_time(a) == strip_time(b)

    def test_csv_format(self, tmp_path):
        rec = run_bo(small_config(afo="local-search"))
        text = rec.to_csv()
        assert text.endswith("\n")
        rows = list(csv.reader(io.StringIO(text)))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 1 + len(rec.rows)
        for r in rows[1:]:
            assert len(r[1]) == 6 and set(r[1]) <= {"0", "1"}
            assert r[6] == ""
        assert rows[1][4] == "" and rows[-1][4] != ""
        path = tmp_path / "out" / "trace.csv"
        rec.write(path)
        assert path.read_text(encoding="utf-8") == text
        meta = json.loads((tmp_path / "out" / "trace.csv.meta.json").read_text())
        assert meta["seed"] == 1 and meta["config"]["benchmark"] == "bqp"

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            run_bo(small_config(), objective=LabsInstance(5))


class TestOracleAndBaselines:
    def test_oracle_matches_enumeration(self):
        inst = BqpInstance(8, seed=2)
        x, v = oracle(inst)
        assert v == min(inst(z) for z in all_bits(8))
        assert inst(x) == v

    def test_random_search_inputs(self):
        inst = LabsInstance(6)
        trace = random_search_inputs(inst, 30, seed=0)
        assert len(trace) == 30 and np.all(np.diff(trace) <= 0)


def record_with(afo, n, times, objectives):
    cfg = small_config(afo=afo, n=n, n_init=1, n_iters=len(times))
    rows = [TraceRow(0, np.zeros(n, dtype=np.int8), 0.0, 0.0)]
    for k, (t, v) in enumerate(zip(times, objectives)):
        rows.append(TraceRow(k + 1, np.zeros(n, dtype=np.int8), 0.0, 0.0, t, v, None))
    return ExperimentRecord(cfg, rows)


class TestMetrics:
    def test_identical_records(self):
        rec = record_with("psr", 10, [5.0, 7.0], [-1.0, -3.0])
        (row,) = afo_metrics([(rec, rec)])
        assert row.pct_improvement == 0.0
        assert row.candidate_time_norm == 1.0 and row.baseline_time_norm == 1.0

    def test_improvement_formula(self):
        cand = record_with("psr", 10, [1.0], [-2.5])
        base = record_with("local-search", 10, [1.0], [-2.0])
        (row,) = afo_metrics([(cand, base)])
        assert row.pct_improvement == pytest.approx(25.0)

    def test_time_normalization(self):
        pairs = [(record_with("psr", 10, [10.0], [-1.0]), record_with("random", 10, [20.0], [-1.0])),
                 (record_with("psr", 20, [40.0], [-1.0]), record_with("random", 20, [80.0], [-1.0]))]
        rows = afo_metrics(pairs)
        assert [r.candidate_time_norm for r in rows] == [1.0, 4.0]
        assert [r.baseline_time_norm for r in rows] == [2.0, 8.0]

    def test_zero_baseline_skipped(self):
        cand = record_with("psr", 10, [1.0, 1.0], [-1.0, -3.0])
        base = record_with("random", 10, [1.0, 1.0], [0.0, -2.0])
        (row,) = afo_metrics([(cand, base)])
        assert row.pct_improvement == pytest.approx(50.0)

    def test_antisymmetric_with_equal_denominators(self):
        assert percent_improvement(-2.0, 2.0) == -percent_improvement(2.0, -2.0)
        assert percent_improvement(4.0, -4.0) == 200.0

    def test_mismatched_pair(self):
        a = record_with("psr", 10, [1.0], [-1.0])
        b = record_with("random", 12, [1.0], [-1.0])
        with pytest.raises(ValueError):
            afo_metrics([(a, b)])


class TestCli:
    def write_config(self, tmp_path, **kw):
        cfg = small_config(**kw).to_dict()
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_run_writes_csv(self, tmp_path):
        path = self.write_config(tmp_path)
        out = tmp_path / "trace.csv"
        assert main(["run", str(path), "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 10

    def test_run_repeats(self, tmp_path):
        path = self.write_config(tmp_path)
        out = tmp_path / "trace.csv"
        assert main(["run", str(path), "--out", str(out), "--repeats", "2", "--seed", "4"]) == 0
        assert (tmp_path / "trace_seed4.csv").exists() and (tmp_path / "trace_seed5.csv").exists()

    def test_oracle(self, tmp_path, capsys):
        path = self.write_config(tmp_path)
        assert main(["oracle", str(path)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["y"] == oracle(BqpInstance(6, seed=1))[1]

    def test_afo_bench(self, tmp_path):
        path = self.write_config(tmp_path, n_iters=2)
        out = tmp_path / "bench.csv"
        assert main(["afo-bench", str(path), "--dims", "5,7", "--afo", "psr,random", "--out", str(out)]) == 0
        rows = list(csv.DictReader(out.open()))
        assert [int(r["n"]) for r in rows] == [5, 7]
        assert float(rows[0]["candidate_time_norm"]) == 1.0

    def test_config_error_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"benchmark": "bqp", "n": 4, "extra": 1}))
        assert main(["run", str(path)]) == 2
        assert main(["run", str(tmp_path / "missing.json")]) == 2

    def test_runtime_error_exit_code(self, tmp_path):
        path = self.write_config(tmp_path, n=25)
        assert main(["oracle", str(path)]) == 3
