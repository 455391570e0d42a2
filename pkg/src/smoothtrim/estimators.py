"""Location L-estimators: trimmed, Winsorized and smoothly trimmed means."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import OverTrimError, ParameterDomainError
from .weights import WeightKind, WeightSpec, discrete_weights, trim_count

__all__ = [
    "SortedSample",
    "as_sorted",
    "EstimatorKind",
    "EstimateResult",
    "Estimator",
    "trimmed_mean",
    "winsorized_mean",
    "smoothly_trimmed_mean",
]


@dataclass(frozen=True, eq=False)
class SortedSample:
    """Ascending, NaN-free data vector."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ParameterDomainError("sample is empty")
        if np.isnan(v).any():
            raise ParameterDomainError("sample contains NaN")
        v.sort(kind="stable")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def as_sorted(sample) -> SortedSample:
    if isinstance(sample, SortedSample):
        return sample
    return SortedSample(sample)


class EstimatorKind(str, enum.Enum):
    TRIMMED_MEAN = "trimmed_mean"
    WINSORIZED_MEAN = "winsorized_mean"
    STM_RAW = "stm_raw"
    STM_NORMALIZED = "stm"
    MEAN = "mean"


@dataclass(frozen=True)
class EstimateResult:
    value: float
    method: EstimatorKind
    alpha: float | None = None
    gamma: float | None = None

    def __float__(self):
        return self.value


def _trim(n: int, alpha: float) -> int:
    if not 0.0 <= alpha < 0.5:
        raise ParameterDomainError(f"alpha must lie in [0, 0.5), got {alpha}")
    r = trim_count(n, alpha)
    if n - 2 * r < 1:
        raise OverTrimError(f"alpha={alpha} trims all {n} observations")
    return r


def _trimmed(x, alpha):
    n = x.shape[-1]
    r = _trim(n, alpha)
    return x[..., r:n - r].mean(axis=-1)


def _winsorized(x, alpha):
    n = x.shape[-1]
    r = _trim(n, alpha)
    core = x[..., r:n - r].sum(axis=-1)
    return (core + r * x[..., r] + r * x[..., n - r - 1]) / n


def _stm(x, spec, normalized=True):
    n = x.shape[-1]
    dw = discrete_weights(n, spec)
    if normalized:
        return x @ dw.normalized
    return x @ dw.raw / n


def trimmed_mean(sample, alpha: float) -> EstimateResult:
    """Mean of ``X_(r+1), ..., X_(n-r)`` with ``r = floor(n alpha)``."""
    x = as_sorted(sample).values
    return EstimateResult(float(_trimmed(x, alpha)), EstimatorKind.TRIMMED_MEAN, alpha)


def winsorized_mean(sample, alpha: float) -> EstimateResult:
    """Mean after pulling the ``r`` extreme values on each side in to ``X_(r+1)`` / ``X_(n-r)``."""
    x = as_sorted(sample).values
    return EstimateResult(float(_winsorized(x, alpha)), EstimatorKind.WINSORIZED_MEAN, alpha)


def smoothly_trimmed_mean(sample, spec: WeightSpec, normalized: bool = True) -> EstimateResult:
    """Smoothly trimmed mean ``sum_i J(i/(n+1)) X_(i)``.

    The normalized variant divides by ``sum_i J(i/(n+1))`` so that the weights
    sum to one; the raw variant divides by ``n``.
    """
    x = as_sorted(sample).values
    kind = EstimatorKind.STM_NORMALIZED if normalized else EstimatorKind.STM_RAW
    gamma = spec.gamma if spec.kind is WeightKind.GENERALIZED else None
    return EstimateResult(float(_stm(x, spec, normalized)), kind, spec.alpha, gamma)


@dataclass(frozen=True)
class Estimator:
    """Picklable estimator descriptor used by resampling and simulation code.

    Calling it on sorted data returns a float; a 2-D array of row-wise sorted
    samples gives one estimate per row.
    """

    kind: EstimatorKind = EstimatorKind.STM_NORMALIZED
    alpha: float = 0.0
    gamma: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EstimatorKind(self.kind))
        if self.kind in (EstimatorKind.STM_NORMALIZED, EstimatorKind.STM_RAW):
            WeightSpec.generalized(self.alpha, self.gamma)

    @classmethod
    def stm(cls, alpha, gamma):
        return cls(EstimatorKind.STM_NORMALIZED, alpha, gamma)

    @classmethod
    def tm(cls, alpha):
        return cls(EstimatorKind.TRIMMED_MEAN, alpha)

    @property
    def spec(self) -> WeightSpec:
        return WeightSpec.generalized(self.alpha, self.gamma)

    @property
    def label(self) -> str:
        if self.kind is EstimatorKind.MEAN:
            return "mean"
        if self.gamma is None:
            return f"{self.kind.value}(alpha={self.alpha:g})"
        return f"{self.kind.value}(alpha={self.alpha:g},gamma={self.gamma:g})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k is EstimatorKind.STM_NORMALIZED:
            out = _stm(x, self.spec, True)
        elif k is EstimatorKind.STM_RAW:
            out = _stm(x, self.spec, False)
        elif k is EstimatorKind.TRIMMED_MEAN:
            out = _trimmed(x, self.alpha)
        elif k is EstimatorKind.WINSORIZED_MEAN:
            out = _winsorized(x, self.alpha)
        else:
            out = x.mean(axis=-1)
        return float(out) if np.ndim(out) == 0 else out
