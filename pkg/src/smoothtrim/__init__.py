"""Smoothly trimmed means with closed-form variances and empirical likelihood intervals."""

__version__ = "0.1.0"

from .distributions import (
    CONTAMINATED_10,
    CONTAMINATED_20,
    STANDARD_NORMAL,
    THREE_POINT,
    EmpiricalQuantile,
    MixtureModel,
    QuantileFunction,
    mixture_cdf,
    mixture_quantile,
    mixture_sample,
    parse_mixture,
    stm_true_mean,
)
from .elikelihood import el_confidence_interval, el_log_ratio, scaling_constant_hat, solve_lambda
from .estimators import (
    EstimateResult,
    Estimator,
    SortedSample,
    smoothly_trimmed_mean,
    trimmed_mean,
    winsorized_mean,
)
from .intervals import ConfidenceInterval, bootstrap_percentile_ci, normal_ci, student_t_ci
from .studies import (
    Cell,
    StudyConfig,
    coverage_study,
    quantile_study,
    select_parameters,
    variance_comparison_study,
)
from .variance import (
    VarianceEstimate,
    influence_function,
    influence_variance_quadrature,
    jackknife_variance,
    stm_variance_hat,
    tm_variance_hat,
)
from .weights import WeightKind, WeightSpec, discrete_weights, eval_weight

__all__ = [
    "CONTAMINATED_10", "CONTAMINATED_20", "STANDARD_NORMAL", "THREE_POINT",
    "EmpiricalQuantile", "MixtureModel", "QuantileFunction",
    "mixture_cdf", "mixture_quantile", "mixture_sample", "parse_mixture", "stm_true_mean",
    "el_confidence_interval", "el_log_ratio", "scaling_constant_hat", "solve_lambda",
    "EstimateResult", "Estimator", "SortedSample",
    "smoothly_trimmed_mean", "trimmed_mean", "winsorized_mean",
    "ConfidenceInterval", "bootstrap_percentile_ci", "normal_ci", "student_t_ci",
    "Cell", "StudyConfig", "coverage_study", "quantile_study", "select_parameters",
    "variance_comparison_study",
    "VarianceEstimate", "influence_function", "influence_variance_quadrature",
    "jackknife_variance", "stm_variance_hat", "tm_variance_hat",
    "WeightKind", "WeightSpec", "discrete_weights", "eval_weight",
]
