import json
import math

import numpy as np
import pytest

from ntle.dist import NtleParams, pdf, quantile, sample
from ntle.errors import DomainError
from ntle.estimation import EstimationMethod, Sample
from ntle import gof
from ntle.gof import (
    CandidateModel,
    compare_models,
    emit_plot_data,
    fit_exponential,
    fit_logistic_exponential,
    information_criteria,
    ks_pvalue,
    ks_statistic,
    ks_sup_distance,
)

P = NtleParams


@pytest.fixture(scope="module")
def ntle_data():
    return Sample(sample(P(1, 1.5, 0.5), 400, 9))


@pytest.fixture(scope="module")
def ntle_report(ntle_data):
    return compare_models(ntle_data, ntle_methods=("mle", "mgfe"))


class TestKsStatistic:
    def test_single_point_at_half(self):
        assert ks_sup_distance([0.5]) == 0.5

    def test_best_case_bound(self):
        # order statistics at the half-integer plotting positions leave
        # exactly 1/(2m) of sup distance
        p = P(1, 1.5, 0.5)
        m = 50
        values = quantile(p, (np.arange(1, m + 1) - 0.5) / m)
        model = CandidateModel("ntle", p, 3, EstimationMethod.MLE)
        assert ks_statistic(model, Sample(values)) == pytest.approx(1.0 / (2 * m), abs=1e-12)

    def test_matches_brute_force(self, ntle_data):
        model = fit_exponential(ntle_data)
        d = ks_statistic(model, ntle_data)
        from ntle.dist import cdf

        grid = np.sort(np.concatenate([ntle_data.values, ntle_data.values - 1e-9]))
        emp = np.searchsorted(ntle_data.values, grid, side="right") / ntle_data.n
        brute = np.max(np.abs(emp - cdf(model.params, grid)))
        assert d == pytest.approx(brute, abs=1e-6)


class TestKsPvalue:
    def test_zero_distance(self):
        assert ks_pvalue(0.0, 77) == 1.0

    def test_full_distance(self):
        assert ks_pvalue(1.0, 1000) == pytest.approx(0.0, abs=1e-12)

    def test_critical_point(self):
        m = 77
        assert ks_pvalue(1.36 / math.sqrt(m), m) == pytest.approx(0.049, abs=1e-3)

    def test_decreasing_in_d(self):
        ds = np.linspace(0.01, 0.5, 25)
        ps = [ks_pvalue(d, 100) for d in ds]
        assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            ks_pvalue(1.5, 10)


class TestInformationCriteria:
    def test_one_parameter_row(self):
        # loglik -510.1720 with p = 1, m = 77
        ic = information_criteria(-510.1720, 1, 77)
        assert ic["aic"] == pytest.approx(1022.3440, abs=1e-4)
        assert ic["bic"] == pytest.approx(1024.6878, abs=1e-4)
        assert ic["caic"] == pytest.approx(1025.6878, abs=1e-4)
        assert ic["hqic"] == pytest.approx(1023.2815, abs=1e-3)

    def test_three_parameter_row(self):
        ic = information_criteria(-500.4086, 3, 77)
        assert ic["aic"] == pytest.approx(1006.8172, abs=1e-3)

    def test_hqic_unit_loglog(self):
        assert information_criteria(0.0, 1, math.e**math.e)["hqic"] == pytest.approx(2.0, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            information_criteria(0.0, 0, 10)
        with pytest.raises(DomainError):
            information_criteria(0.0, 1, 1)


class TestBaselineFits:
    def test_exponential_closed_form(self, ntle_data):
        model = fit_exponential(ntle_data)
        assert model.params.lam == pytest.approx(1.0 / float(np.mean(ntle_data.values)), rel=1e-14)
        assert model.n_params == 1
        assert model.free_params() == (model.params.lam,)

    def test_mean_scale_data(self):
        # rate recovers 1/mean on data of mean about 278
        rng = np.random.default_rng(0)
        data = rng.exponential(278.0, 400) + 1e-9
        model = fit_exponential(Sample(data))
        assert model.params.lam == pytest.approx(1.0 / float(np.mean(data)), rel=1e-12)

    def test_le_improves_on_exponential(self, ntle_data):
        from ntle.estimation import log_likelihood

        exp_model = fit_exponential(ntle_data)
        le_model = fit_logistic_exponential(ntle_data)
        assert le_model.params.delta == 0.0
        assert log_likelihood(le_model.params, ntle_data) >= log_likelihood(exp_model.params, ntle_data) - 1e-6

    def test_submodel_pinning_reproduces_densities(self):
        ys = np.linspace(0.01, 6.0, 80)
        # exponential == (lam, 1, 0)
        lam = 0.8
        assert np.max(np.abs(pdf(P(lam, 1.0, 0.0), ys) - lam * np.exp(-lam * ys))) < 1e-12


class TestCompareModels:
    def test_nesting_order(self, ntle_report):
        ll = {r.label: r.loglik for r in ntle_report.rows}
        assert ll["ntle (mle)"] >= ll["logistic_exponential"] - 1e-6
        assert ll["logistic_exponential"] >= ll["exponential"] - 1e-6

    def test_report_arithmetic_exact(self, ntle_report):
        for r in ntle_report.rows:
            assert r.aic == -2.0 * r.loglik + 2 * r.model.n_params
            assert r.bic == -2.0 * r.loglik + r.model.n_params * math.log(ntle_report.m)
            assert r.caic == pytest.approx(r.bic + r.model.n_params, rel=1e-14)
            assert r.hqic == -2.0 * r.loglik + 2 * r.model.n_params * math.log(math.log(ntle_report.m))

    def test_sorted_by_aic(self, ntle_report):
        aics = [r.aic for r in ntle_report.rows if not r.error]
        assert aics == sorted(aics)

    def test_exponential_data_prefers_exponential_bic(self):
        s = Sample(sample(P(1, 1, 0), 5000, 13))
        report = compare_models(s)
        bics = {r.label: r.bic for r in report.rows}
        assert bics["exponential"] == min(bics.values())

    def test_failing_model_flagged_not_fatal(self, ntle_data, monkeypatch):
        real_fit = gof.fit

        def flaky(s, method, bayes=None, starts=None, extra_starts=()):
            if method is EstimationMethod.MGFE:
                raise RuntimeError("boom")
            return real_fit(s, method, bayes=bayes, starts=starts, extra_starts=extra_starts)

        monkeypatch.setattr(gof, "fit", flaky)
        report = compare_models(ntle_data, ntle_methods=("mle", "mgfe"))
        by_label = {r.label: r for r in report.rows}
        assert by_label["ntle (mgfe)"].error
        assert not by_label["ntle (mle)"].error

    def test_json_and_text_outputs(self, ntle_report, tmp_path):
        path = tmp_path / "report.json"
        ntle_report.to_json(path)
        payload = json.loads(path.read_text())
        assert payload["m"] == ntle_report.m
        assert len(payload["models"]) == len(ntle_report.rows)
        text = ntle_report.to_text()
        assert "AIC" in text and "exponential" in text


class TestPlotData:
    def test_columns_and_invariants(self, ntle_report, ntle_data):
        plot = emit_plot_data(ntle_report, ntle_data, grid_size=300)
        cols = plot.columns
        assert set(c for c in cols if c.startswith("fitted_cdf")) == {
            "fitted_cdf_exponential",
            "fitted_cdf_logistic_exponential",
            "fitted_cdf_ntle_mle",
            "fitted_cdf_ntle_mgfe",
        }
        grid = cols["y"]
        assert grid[0] == 0.0
        assert grid[-1] == pytest.approx(float(ntle_data.values.max()) * 1.05, rel=1e-12)
        # empirical step function reaches 1 at the sample maximum
        at_max = np.searchsorted(grid, float(ntle_data.values.max()), side="left")
        assert cols["empirical_cdf"][-1] == 1.0
        for name, col in cols.items():
            if name.startswith("fitted_cdf"):
                assert np.all(np.diff(col) >= -1e-15)
            if name.startswith("fitted_pdf"):
                assert abs(np.trapezoid(col, grid) - 1.0) < 0.02

    def test_histogram_rule(self, ntle_report, ntle_data):
        plot = emit_plot_data(ntle_report, ntle_data)
        assert plot.hist_edges[0] == pytest.approx(float(ntle_data.values.min()))
        assert plot.hist_edges[-1] == pytest.approx(float(ntle_data.values.max()))
        width = np.diff(plot.hist_edges)
        total = float(np.sum(plot.hist_density * width))
        assert total == pytest.approx(1.0, rel=1e-9)

    def test_csv_round_trip(self, ntle_report, ntle_data, tmp_path):
        plot = emit_plot_data(ntle_report, ntle_data, grid_size=50)
        path = tmp_path / "plot.csv"
        plot.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].split(",")[0] == "y"
        assert len(lines) == 51
        hpath = tmp_path / "hist.csv"
        plot.hist_to_csv(hpath)
        assert hpath.read_text().splitlines()[0] == "bin_left,bin_right,density"


class TestLogisticExponentialPinning:
    def test_delta_zero_density_matches_direct_formula(self):
        lam, beta = 0.9, 1.7
        ys = np.linspace(0.05, 6.0, 60)
        u = np.expm1(lam * ys) ** beta
        direct = (
            beta * lam * np.exp(lam * ys) * np.expm1(lam * ys) ** (beta - 1.0)
            / (1.0 + u) ** 2
        )
        assert np.max(np.abs(pdf(P(lam, beta, 0.0), ys) - direct)) < 1e-12
