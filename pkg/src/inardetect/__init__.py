"""Additive-outlier detection for Poisson INAR(1) count time series.

The observation model is Y_t = X_t + eta_t * delta_t where X_t is a latent
Poisson INAR(1) process; a Gibbs sampler with ARMS steps estimates the
posterior outlier probability of every time point together with the model
parameters, and conditional least squares provides the contaminated baseline
fit and the chain initialization.
"""

from .arms import ArmsEnvelope, arms_draw
from .cls import ClsFit, cls_fit, remove_outliers_and_refit
from .conditionals import (
    FinitePmf,
    OutlierProbability,
    alpha_log_conditional,
    delta_probability,
    epsilon_draw,
    eta_conditional_pmf,
    lambda_log_conditional,
)
from .diagnostics import SeriesSummary, summarize_series
from .exceptions import (
    ArmsInitializationError,
    ConfigError,
    CsvParseError,
    DegenerateSeriesError,
    FeasibilityError,
    InarDetectError,
    NumericalError,
    SeriesValidationError,
)
from .gibbs import (
    ChainTrace,
    DetectionReport,
    GibbsConfig,
    compute_beta_info,
    run_chain,
    summarize,
)
from .io import RunConfig, SimulationSpec, parse_count_csv
from .pipeline import PipelineResult, run_pipeline
from .posterior import (
    Hyperparams,
    LatentConfig,
    conditional_log_likelihood,
    log_posterior,
    log_prior,
)
from .process import (
    Contamination,
    CountSeries,
    InarParams,
    binomial_thin,
    contaminate,
    decontaminate,
    simulate,
    transition_log_pmf,
)

__version__ = "0.1.0"

__all__ = [
    "ArmsEnvelope",
    "ArmsInitializationError",
    "ChainTrace",
    "ClsFit",
    "ConfigError",
    "Contamination",
    "CountSeries",
    "CsvParseError",
    "DegenerateSeriesError",
    "DetectionReport",
    "FeasibilityError",
    "FinitePmf",
    "GibbsConfig",
    "Hyperparams",
    "InarDetectError",
    "InarParams",
    "LatentConfig",
    "NumericalError",
    "OutlierProbability",
    "PipelineResult",
    "RunConfig",
    "SeriesSummary",
    "SeriesValidationError",
    "SimulationSpec",
    "alpha_log_conditional",
    "arms_draw",
    "binomial_thin",
    "cls_fit",
    "compute_beta_info",
    "conditional_log_likelihood",
    "contaminate",
    "decontaminate",
    "delta_probability",
    "epsilon_draw",
    "eta_conditional_pmf",
    "lambda_log_conditional",
    "log_posterior",
    "log_prior",
    "parse_count_csv",
    "remove_outliers_and_refit",
    "run_chain",
    "run_pipeline",
    "simulate",
    "summarize",
    "summarize_series",
    "transition_log_pmf",
]
