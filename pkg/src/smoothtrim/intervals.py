"""Normal-approximation, bootstrap-percentile and Student-t confidence intervals."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri, stdtrit

from .distributions import make_rng
from .errors import ParameterDomainError, StudyError
from .estimators import Estimator

__all__ = [
    "CIMethod",
    "ConfidenceInterval",
    "z_quantile",
    "chi2_quantile",
    "normal_ci",
    "bootstrap_percentile_ci",
    "student_t_ci",
]

BOOTSTRAP_BLOCK = 250


class CIMethod(str, enum.Enum):
    NORMAL = "normal"
    EL = "el"
    BOOTSTRAP = "boot"
    STUDENT_T = "t"


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: CIMethod
    point: float
    clipped: bool = False
    details: dict = field(default_factory=dict, compare=False)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def as_dict(self) -> dict:
        out = {
            "method": self.method.value,
            "level": self.level,
            "point": self.point,
            "lower": self.lower,
            "upper": self.upper,
            "clipped": self.clipped,
        }
        out.update(self.details)
        return out


def _check_level(level):
    if not 0.0 < level < 1.0:
        raise ParameterDomainError(f"confidence level must lie in (0, 1), got {level}")


def z_quantile(level: float) -> float:
    """Two-sided standard normal critical value, ``z_{(1+level)/2}``."""
    _check_level(level)
    return float(ndtri(0.5 * (1.0 + level)))


def chi2_quantile(level: float) -> float:
    """``level`` quantile of chi-square with one degree of freedom (a squared z)."""
    return z_quantile(level) ** 2


def normal_ci(estimate, variance, level: float = 0.95, n: int | None = None) -> ConfidenceInterval:
    """``point +- z * sqrt(variance)``.

    ``variance`` is a :class:`~smoothtrim.variance.VarianceEstimate` (converted
    to estimator level, which needs ``n`` for functional-level values) or a
    plain float taken to be estimator-level.
    """
    point = float(getattr(estimate, "value", estimate))
    if hasattr(variance, "estimator_level"):
        var = variance.estimator_level(n)
    else:
        var = float(variance)
    if var < 0:
        raise ParameterDomainError(f"variance must be non-negative, got {var}")
    half = z_quantile(level) * math.sqrt(var)
    return ConfidenceInterval(point - half, point + half, level, CIMethod.NORMAL, point)


def _evaluate(estimator, resamples):
    if isinstance(estimator, Estimator):
        return np.asarray(estimator(resamples), dtype=float), 0
    out = np.full(resamples.shape[0], np.nan)
    for k, row in enumerate(resamples):
        try:
            est = estimator(row)
            out[k] = float(getattr(est, "value", est))
        except (ArithmeticError, ValueError):
            pass
    failed = int(np.sum(~np.isfinite(out)))
    return out, failed


def bootstrap_percentile_ci(sample, estimator, level: float = 0.95, B: int = 2000,
                            seed: int = 0) -> ConfidenceInterval:
    """Percentile bootstrap interval with type-7 quantile interpolation.

    Resamples are drawn in fixed blocks of ``BOOTSTRAP_BLOCK``, block ``b``
    from the stream ``(seed, "bootstrap", b)``, so the interval depends on
    ``seed`` and ``B`` only. Resamples on which the estimator fails are
    skipped; more than 1% failures is an error.
    """
    _check_level(level)
    if B < 200:
        raise ParameterDomainError(f"need at least 200 bootstrap resamples, got {B}")
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    estimates, failures = [], 0
    for block, start in enumerate(range(0, B, BOOTSTRAP_BLOCK)):
        size = min(BOOTSTRAP_BLOCK, B - start)
        rng = make_rng(seed, "bootstrap", block)
        resamples = np.sort(x[rng.integers(0, n, size=(size, n))], axis=1)
        est, failed = _evaluate(estimator, resamples)
        estimates.append(est)
        failures += failed
    if failures > 0.01 * B:
        raise StudyError(f"estimator failed on {failures} of {B} bootstrap resamples")
    est = np.concatenate(estimates)
    est = est[np.isfinite(est)]
    lower, upper = np.quantile(est, [0.5 * (1 - level), 0.5 * (1 + level)])
    point = estimator(x)
    point = float(getattr(point, "value", point))
    return ConfidenceInterval(
        float(lower), float(upper), level, CIMethod.BOOTSTRAP, point,
        details={"B": B, "failures": failures},
    )


def student_t_ci(sample, level: float = 0.95) -> ConfidenceInterval:
    """Classical ``mean +- t_{(1+level)/2, n-1} s / sqrt(n)`` interval."""
    _check_level(level)
    x = np.asarray(sample, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ParameterDomainError("Student-t interval needs at least two observations")
    mean = float(x.mean())
    half = float(stdtrit(n - 1, 0.5 * (1 + level))) * float(x.std(ddof=1)) / math.sqrt(n)
    return ConfidenceInterval(mean - half, mean + half, level, CIMethod.STUDENT_T, mean)
