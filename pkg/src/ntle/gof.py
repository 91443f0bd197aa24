"""Model comparison against the nested baselines.

Fits the exponential (rate only), the logistic-exponential (rate and
shape; the delta = 0 sub-family) and the full three-parameter model to a
dataset, then reports log-likelihood, AIC/BIC/CAIC/HQIC, the
Kolmogorov-Smirnov statistic and its asymptotic p-value per model, plus
tabular data for density/CDF overlay plots.

The baselines are genuine sub-families: exponential == (lam, 1, 0) and
logistic-exponential == (lam, beta, 0), so every fitted model is carried
around as a canonical three-parameter embedding and evaluated with the
same distribution code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dist import NtleParams, cdf, pdf
from .errors import DomainError
from .estimation import (
    BayesConfig,
    EstimationMethod,
    Sample,
    fit,
    log_likelihood,
)

__all__ = [
    "CandidateModel",
    "GofRow",
    "GofReport",
    "PlotData",
    "ks_statistic",
    "ks_sup_distance",
    "ks_pvalue",
    "information_criteria",
    "fit_exponential",
    "fit_logistic_exponential",
    "compare_models",
    "emit_plot_data",
]

KIND_EXPONENTIAL = "exponential"
KIND_LE = "logistic_exponential"
KIND_NTLE = "ntle"


@dataclass(frozen=True)
class CandidateModel:
    """A fitted model in its canonical three-parameter embedding.

    n_params counts the free parameters actually estimated (1 for the
    exponential, 2 for the logistic-exponential, 3 for the full family).
    """

    kind: str
    params: NtleParams
    n_params: int
    method: EstimationMethod

    @property
    def label(self) -> str:
        if self.kind == KIND_NTLE:
            return f"ntle ({self.method.value})"
        return self.kind

    def free_params(self) -> tuple[float, ...]:
        lam, beta, delta = self.params.as_tuple()
        if self.kind == KIND_EXPONENTIAL:
            return (lam,)
        if self.kind == KIND_LE:
            return (lam, beta)
        return (lam, beta, delta)


def ks_sup_distance(fitted_probs) -> float:
    """sup-distance of an empirical CDF from fitted probabilities at the
    sorted order statistics, checking both sides of each step."""
    g = np.asarray(fitted_probs, dtype=float)
    m = g.size
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - g), np.max(g - (i - 1) / m)))


def ks_statistic(model: CandidateModel, s: Sample) -> float:
    """sup-distance between the empirical CDF and the fitted CDF."""
    return ks_sup_distance(cdf(model.params, s.values))


def ks_pvalue(d: float, m: int) -> float:
    """Asymptotic Kolmogorov p-value Q(sqrt(m) * d) from the alternating
    series 2 * sum (-1)^(k-1) exp(-2 k^2 x^2), truncated at 1e-12."""
    d = float(d)
    if not (0.0 <= d <= 1.0):
        raise DomainError(f"K-S statistic must lie in [0, 1], got {d!r}")
    x = math.sqrt(m) * d
    if x < 1e-8:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 1_000_000):
        term = math.exp(-2.0 * k * k * x * x)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def information_criteria(loglik: float, p: int, m: int) -> dict[str, float]:
    """AIC, BIC, CAIC and HQIC from a maximized log-likelihood, parameter
    count p and sample size m."""
    if m < 2:
        raise DomainError(f"sample size m must be >= 2, got {m!r}")
    if p < 1:
        raise DomainError(f"parameter count p must be >= 1, got {p!r}")
    neg2 = -2.0 * loglik
    return {
        "aic": neg2 + 2.0 * p,
        "bic": neg2 + p * math.log(m),
        "caic": neg2 + p * (math.log(m) + 1.0),
        "hqic": neg2 + 2.0 * p * math.log(math.log(m)),
    }


def fit_exponential(s: Sample) -> CandidateModel:
    """Exponential maximum likelihood: rate = 1/mean, in closed form."""
    lam = 1.0 / float(np.mean(s.values))
    return CandidateModel(
        KIND_EXPONENTIAL, NtleParams(lam, 1.0, 0.0), 1, EstimationMethod.MLE
    )


def fit_logistic_exponential(s: Sample) -> CandidateModel:
    """Logistic-exponential maximum likelihood: the delta = 0 sub-family,
    optimized over (log lam, log beta) by the same simplex strategy used
    for the full model.  The exponential solution seeds one start, so the
    fitted log-likelihood can only improve on it."""
    values = s.values
    lam_exp = 1.0 / float(np.mean(values))

    def neg_ll(x: np.ndarray) -> float:
        lam = math.exp(min(max(x[0], -30.0), 30.0))
        beta = math.exp(min(max(x[1], -30.0), 30.0))
        val = log_likelihood(NtleParams(lam, beta, 0.0), s)
        return -val if math.isfinite(val) else 1e300

    starts = [
        (lam_exp, 1.0),
        (lam_exp, 0.5),
        (lam_exp, 2.0),
        (math.log(2.0) / float(np.median(values)), 1.5),
    ]
    best = None
    for lam0, beta0 in starts:
        res = minimize(
            neg_ll,
            np.array([math.log(lam0), math.log(beta0)]),
            method="Nelder-Mead",
            options={"maxiter": 800, "xatol": 1e-8, "fatol": 1e-7},
        )
        if best is None or res.fun < best.fun:
            best = res
    res = minimize(
        neg_ll, best.x, method="Nelder-Mead",
        options={"maxiter": 800, "xatol": 1e-8, "fatol": 1e-7},
    )
    if res.fun <= best.fun:
        best = res
    lam = math.exp(best.x[0])
    beta = math.exp(best.x[1])
    return CandidateModel(KIND_LE, NtleParams(lam, beta, 0.0), 2, EstimationMethod.MLE)


@dataclass(frozen=True)
class GofRow:
    model: CandidateModel | None
    label: str
    loglik: float
    aic: float
    bic: float
    caic: float
    hqic: float
    ks_stat: float
    ks_pvalue: float
    error: str = ""


@dataclass
class GofReport:
    m: int
    rows: list[GofRow]

    def to_json(self, path) -> None:
        payload = {"m": self.m, "models": []}
        for r in self.rows:
            entry = {
                "label": r.label,
                "error": r.error,
            }
            if r.model is not None:
                entry.update(
                    {
                        "kind": r.model.kind,
                        "method": r.model.method.value,
                        "n_params": r.model.n_params,
                        "params": list(r.model.free_params()),
                        "loglik": r.loglik,
                        "aic": r.aic,
                        "bic": r.bic,
                        "caic": r.caic,
                        "hqic": r.hqic,
                        "ks_stat": r.ks_stat,
                        "ks_pvalue": r.ks_pvalue,
                    }
                )
            payload["models"].append(entry)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_text(self) -> str:
        header = (
            f"{'model':<22}{'params':<34}{'loglik':>12}{'AIC':>12}{'BIC':>12}"
            f"{'CAIC':>12}{'HQIC':>12}{'K-S':>9}{'p-value':>9}"
        )
        lines = [header, "-" * len(header)]
        for r in self.rows:
            if r.error:
                lines.append(f"{r.label:<22}failed: {r.error}")
                continue
            pstr = ", ".join(f"{v:.6g}" for v in r.model.free_params())
            lines.append(
                f"{r.label:<22}{pstr:<34}{r.loglik:>12.4f}{r.aic:>12.4f}"
                f"{r.bic:>12.4f}{r.caic:>12.4f}{r.hqic:>12.4f}"
                f"{r.ks_stat:>9.4f}{r.ks_pvalue:>9.4f}"
            )
        return "\n".join(lines)


def _row_for(model: CandidateModel, s: Sample) -> GofRow:
    ll = log_likelihood(model.params, s)
    ic = information_criteria(ll, model.n_params, s.n)
    d = ks_statistic(model, s)
    return GofRow(
        model=model,
        label=model.label,
        loglik=ll,
        aic=ic["aic"],
        bic=ic["bic"],
        caic=ic["caic"],
        hqic=ic["hqic"],
        ks_stat=d,
        ks_pvalue=ks_pvalue(d, s.n),
    )


def compare_models(
    s: Sample,
    ntle_methods=(EstimationMethod.MLE,),
    bayes: BayesConfig | None = None,
) -> GofReport:
    """Fit the two baselines by maximum likelihood and the full model by
    each requested method; rows come back sorted by AIC.  The baseline
    solutions seed the full-model optimizer, which preserves the nested
    log-likelihood ordering.  A model that fails to fit is reported as a
    flagged row without aborting the comparison."""
    rows: list[GofRow] = []
    exp_model = le_model = None
    try:
        exp_model = fit_exponential(s)
        rows.append(_row_for(exp_model, s))
    except Exception as exc:
        rows.append(_failed_row(KIND_EXPONENTIAL, exc))
    try:
        le_model = fit_logistic_exponential(s)
        rows.append(_row_for(le_model, s))
    except Exception as exc:
        rows.append(_failed_row(KIND_LE, exc))

    extra_starts = [m.params for m in (le_model, exp_model) if m is not None]
    for method in ntle_methods:
        method = EstimationMethod(method.lower()) if isinstance(method, str) else method
        try:
            res = fit(s, method, bayes=bayes, extra_starts=extra_starts)
            model = CandidateModel(KIND_NTLE, res.params, 3, method)
            rows.append(_row_for(model, s))
        except Exception as exc:
            rows.append(_failed_row(f"ntle ({method.value})", exc))

    rows.sort(key=lambda r: math.inf if r.error else r.aic)
    return GofReport(m=s.n, rows=rows)


def _failed_row(label: str, exc: Exception) -> GofRow:
    return GofRow(
        model=None,
        label=label,
        loglik=math.nan,
        aic=math.nan,
        bic=math.nan,
        caic=math.nan,
        hqic=math.nan,
        ks_stat=math.nan,
        ks_pvalue=math.nan,
        error=str(exc) or type(exc).__name__,
    )


@dataclass
class PlotData:
    """Grid columns for CDF/PDF overlays plus histogram bins for the data."""

    columns: dict[str, np.ndarray]
    hist_edges: np.ndarray
    hist_density: np.ndarray

    def to_csv(self, path) -> None:
        names = list(self.columns)
        arr = np.column_stack([self.columns[c] for c in names])
        lines = [",".join(names)]
        for row in arr:
            lines.append(",".join(repr(float(x)) for x in row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def hist_to_csv(self, path) -> None:
        lines = ["bin_left,bin_right,density"]
        for left, right, dens in zip(
            self.hist_edges[:-1], self.hist_edges[1:], self.hist_density
        ):
            lines.append(f"{float(left)!r},{float(right)!r},{float(dens)!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _histogram_edges(values: np.ndarray) -> np.ndarray:
    """Freedman-Diaconis bin edges, falling back to sqrt(m) bins when the
    IQR degenerates."""
    m = values.size
    q75, q25 = np.percentile(values, [75, 25])
    width = 2.0 * (q75 - q25) / m ** (1.0 / 3.0)
    span = float(values.max() - values.min())
    if width <= 0.0 or span <= 0.0:
        bins = max(1, math.ceil(math.sqrt(m)))
    else:
        bins = max(1, math.ceil(span / width))
    return np.linspace(float(values.min()), float(values.max()), bins + 1)


def emit_plot_data(report: GofReport, s: Sample, grid_size: int = 200) -> PlotData:
    """Tabulate empirical and fitted CDFs plus fitted PDFs on an even grid
    over [0, 1.05 * max(sample)], with data histogram bins alongside."""
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    values = s.values
    grid = np.linspace(0.0, float(values.max()) * 1.05, grid_size)
    columns: dict[str, np.ndarray] = {
        "y": grid,
        "empirical_cdf": np.searchsorted(values, grid, side="right") / s.n,
    }
    for row in report.rows:
        if row.error or row.model is None:
            continue
        tag = row.model.label.replace(" ", "_").replace("(", "").replace(")", "")
        columns[f"fitted_cdf_{tag}"] = cdf(row.model.params, grid)
        columns[f"fitted_pdf_{tag}"] = pdf(row.model.params, grid)
    edges = _histogram_edges(values)
    density, _ = np.histogram(values, bins=edges, density=True)
    return PlotData(columns=columns, hist_edges=edges, hist_density=density)
