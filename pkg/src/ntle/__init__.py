"""Transmuted logistic-exponential lifetime distribution toolkit.

Distribution functions and sampling, derived analytics (entropies,
moments, residual life, concentration curves, stress-strength,
stochastic ordering), ten parameter-estimation methods, a Monte Carlo
estimator-evaluation harness, and model comparison against the nested
exponential and logistic-exponential baselines.
"""

from .analytics import (
    EntropyResult,
    QuadratureSpec,
    StochasticOrderResult,
    bonferroni_curve,
    incomplete_moment,
    k_delta,
    lorenz_curve,
    mean_residual_life,
    raw_moment,
    renyi_entropy_integer,
    renyi_entropy_numeric,
    reversed_residual_life,
    shannon_entropy,
    stochastically_leq,
    stress_strength,
)
from .dist import (
    MODE_BOUNDARY_AT_ZERO,
    MODE_INTERIOR,
    MODE_UNBOUNDED_AT_ZERO,
    ModeResult,
    NtleParams,
    cdf,
    from_u,
    hazard,
    log_pdf,
    mode,
    pdf,
    quantile,
    sample,
    survival,
    to_u,
)
from .errors import (
    DatasetError,
    DivergenceError,
    DomainError,
    NumericalError,
    PreconditionError,
    TailOverflowError,
)
from .estimation import (
    BayesConfig,
    EstimationMethod,
    FitResult,
    Sample,
    fit,
    fit_from_start,
    fit_ade,
    fit_bayes,
    fit_cvme,
    fit_lse,
    fit_mgfe,
    fit_mle,
    fit_mme,
    fit_mme_from_moments,
    fit_mps,
    fit_pce,
    fit_wlse,
    wlse_weights,
    log_likelihood,
    observed_information,
)
from .gof import (
    CandidateModel,
    GofReport,
    GofRow,
    PlotData,
    compare_models,
    emit_plot_data,
    fit_exponential,
    fit_logistic_exponential,
    information_criteria,
    ks_pvalue,
    ks_statistic,
    ks_sup_distance,
)
from .simulation import (
    CellMetrics,
    SimulationConfig,
    SimulationReport,
    compute_metrics,
    derive_seed,
    load_simulation_config,
    run_campaign,
)

__version__ = "0.1.0"
