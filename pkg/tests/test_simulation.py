import json
import math

import numpy as np
import pytest

from ntle.dist import NtleParams
from ntle.errors import DomainError
from ntle.estimation import EstimationMethod, FitResult
from ntle import simulation
from ntle.simulation import (
    SimulationConfig,
    compute_metrics,
    derive_seed,
    load_simulation_config,
    run_campaign,
)

P = NtleParams
TRUTH = P(1, 1.5, 0.5)


def small_config(**overrides):
    base = dict(
        true_params=TRUTH,
        sample_sizes=(20, 35),
        methods=("mle", "mgfe"),
        replications=4,
        base_seed=99,
    )
    base.update(overrides)
    return SimulationConfig(**base)


def report_fingerprint(report):
    # everything except wall-clock timings
    return json.dumps(
        {"rows": [r.__dict__ for r in report.rows], "checksums": report.sample_checksums},
        sort_keys=True,
    )


class TestComputeMetrics:
    def test_single_exact_estimate_all_zero(self):
        m = compute_metrics([TRUTH], TRUTH)
        for name in ("lambda", "beta", "delta"):
            assert m[name]["bias"] == 0.0
            assert m[name]["mse"] == 0.0
            assert m[name]["rmse"] == 0.0

    def test_hand_arithmetic(self):
        m = compute_metrics([P(0.9, 1.5, 0.5), P(1.1, 1.5, 0.5)], TRUTH)
        assert m["lambda"]["bias"] == pytest.approx(0.0, abs=1e-15)
        assert m["lambda"]["mse"] == pytest.approx(0.01, rel=1e-12)
        assert m["lambda"]["rmse"] == pytest.approx(0.1, rel=1e-12)

    def test_against_brute_force_recomputation(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            ests = [
                P(rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(-0.8, 0.8))
                for _ in range(12)
            ]
            m = compute_metrics(ests, TRUTH)
            for j, name in enumerate(("lambda", "beta", "delta")):
                errs = [e.as_tuple()[j] - TRUTH.as_tuple()[j] for e in ests]
                bias = sum(errs) / len(errs)
                mse = sum(e * e for e in errs) / len(errs)
                assert m[name]["bias"] == pytest.approx(bias, rel=1e-12, abs=1e-15)
                assert m[name]["mse"] == pytest.approx(mse, rel=1e-12)
                assert m[name]["rmse"] == pytest.approx(math.sqrt(mse), rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            compute_metrics([], TRUTH)


class TestSeedDerivation:
    def test_deterministic_and_distinct(self):
        assert derive_seed(1, 20, 3) == derive_seed(1, 20, 3)
        assert derive_seed(1, 20, 3) != derive_seed(1, 20, 4)
        assert derive_seed(1, 20, 3) != derive_seed(2, 20, 3)


class TestRunCampaign:
    def test_perfect_estimator_stub(self, monkeypatch):
        def stub_fit(s, method, *args, **kwargs):
            return FitResult(
                params=TRUTH,
                method=EstimationMethod.MLE,
                objective=0.0,
                converged=True,
                iterations=0,
            )

        monkeypatch.setattr(simulation, "fit", stub_fit)
        monkeypatch.setattr(simulation, "fit_from_start", stub_fit)
        report = run_campaign(small_config(replications=1))
        for row in report.rows:
            assert row.bias == 0.0
            assert row.mse == 0.0
            assert row.rmse == 0.0
            assert row.failures == 0

    def test_deterministic_and_parallel_equivalent(self):
        cfg = small_config()
        serial = run_campaign(cfg)
        again = run_campaign(cfg)
        parallel = run_campaign(cfg, n_jobs=2)
        assert report_fingerprint(serial) == report_fingerprint(again)
        assert report_fingerprint(serial) == report_fingerprint(parallel)

    def test_methods_share_samples(self):
        # the same (n, r) cell must see the same data regardless of the
        # method set requested
        one = run_campaign(small_config(methods=("mle",)))
        both = run_campaign(small_config(methods=("mle", "wlse")))
        assert one.sample_checksums == both.sample_checksums

    def test_rmse_is_sqrt_mse_exactly(self):
        report = run_campaign(small_config())
        for row in report.rows:
            assert row.rmse == math.sqrt(row.mse)

    def test_failing_method_marks_cell_and_continues(self, monkeypatch):
        real_fit = simulation.fit_from_start

        def flaky_fit(s, method, *args, **kwargs):
            if method is EstimationMethod.MGFE:
                raise RuntimeError("boom")
            return real_fit(s, method, *args, **kwargs)

        monkeypatch.setattr(simulation, "fit_from_start", flaky_fit)
        report = run_campaign(small_config(replications=2))
        mgfe_rows = [r for r in report.rows if r.method == "mgfe"]
        mle_rows = [r for r in report.rows if r.method == "mle"]
        assert mgfe_rows and all(r.used == 0 and math.isnan(r.bias) for r in mgfe_rows)
        assert all(r.note == "no replication converged" for r in mgfe_rows)
        assert all(r.used > 0 for r in mle_rows)

    def test_failures_counted(self, monkeypatch):
        real_fit = simulation.fit_from_start
        calls = {"n": 0}

        def sometimes_failing(s, method, *args, **kwargs):
            calls["n"] += 1
            res = real_fit(s, method, *args, **kwargs)
            if calls["n"] % 3 == 0:
                return FitResult(res.params, res.method, res.objective, False, res.iterations)
            return res

        monkeypatch.setattr(simulation, "fit_from_start", sometimes_failing)
        report = run_campaign(small_config(methods=("mle",), replications=3))
        total_failures = {(r.method, r.n): r.failures for r in report.rows}
        assert any(f > 0 for f in total_failures.values())
        for row in report.rows:
            assert row.used + row.failures == 3

    def test_report_files_round_trip(self, tmp_path):
        report = run_campaign(small_config(replications=2))
        jpath = tmp_path / "r.json"
        cpath = tmp_path / "r.csv"
        report.to_json(jpath)
        report.to_csv(cpath)
        payload = json.loads(jpath.read_text())
        assert payload["config"]["replications"] == 2
        assert len(payload["cells"]) == len(report.rows)
        header = cpath.read_text().splitlines()[0]
        assert header.startswith("method,n,parameter,bias,mse,rmse,mc_std_error")

    def test_config_validation(self):
        with pytest.raises(DomainError):
            small_config(sample_sizes=(2,))
        with pytest.raises(DomainError):
            small_config(replications=0)
        with pytest.raises(DomainError):
            small_config(methods=())


class TestConfigFile:
    def test_load_and_run(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "true_params": {"lambda": 1.0, "beta": 1.5, "delta": 0.5},
                    "sample_sizes": [20],
                    "methods": ["mle"],
                    "replications": 2,
                    "base_seed": 7,
                }
            )
        )
        cfg = load_simulation_config(cfg_path)
        assert cfg.true_params == TRUTH
        assert cfg.methods == (EstimationMethod.MLE,)
        report = run_campaign(cfg)
        assert len(report.rows) == 3

    def test_unknown_key_named(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text('{"true_params": {"lambda": 1, "beta": 1, "delta": 0}, "bogus": 1}')
        with pytest.raises(DomainError, match="bogus"):
            load_simulation_config(cfg_path)

    def test_bayes_block(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "true_params": {"lambda": 1.0, "beta": 1.5, "delta": 0.5},
                    "sample_sizes": [20],
                    "methods": ["bayes"],
                    "replications": 1,
                    "base_seed": 7,
                    "bayes": {"iterations": 400, "burn_in": 100},
                }
            )
        )
        cfg = load_simulation_config(cfg_path)
        assert cfg.bayes.iterations == 400
        report = run_campaign(cfg)
        assert all(r.used == 1 for r in report.rows)


class TestConsistencyInvariant:
    def test_mle_bias_and_rmse_shrink_with_n(self):
        # 200 replications at n = 50 and n = 1000: both |bias| and RMSE of
        # every parameter must improve at the larger size
        report = run_campaign(
            SimulationConfig(TRUTH, (50, 1000), (EstimationMethod.MLE,), 200, 31415),
            n_jobs=2,
        )
        cell = {(r.n, r.parameter): r for r in report.rows}
        for param in ("lambda", "beta", "delta"):
            assert abs(cell[(1000, param)].bias) < abs(cell[(50, param)].bias)
            assert cell[(1000, param)].rmse < cell[(50, param)].rmse
