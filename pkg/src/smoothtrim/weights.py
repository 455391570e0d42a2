"""Weight functions for smoothly trimmed means and their discretisation.

Four families are supported:

* ``GENERALIZED`` -- zero below ``alpha``, a linear ramp up to 1 on
  ``[alpha, gamma)``, flat at 1 on ``[gamma, 1 - gamma]`` and mirrored above.
* ``TRIANGULAR`` -- Stigler's triangle, the ``gamma = 0.5`` member of the
  generalized family.
* ``STIGLER_TRAPEZOID`` -- Stigler's trapezoid with height
  ``h = 2 / (2 - 3 alpha)`` supported on ``[alpha/2, 1 - alpha/2]``.
* ``HARD_TRIM`` -- the indicator of ``(alpha, 1 - alpha)``.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightsError, ParameterDomainError

__all__ = [
    "WeightKind",
    "WeightSpec",
    "DiscreteWeights",
    "eval_weight",
    "discrete_weights",
    "trim_count",
]


class WeightKind(str, enum.Enum):
    GENERALIZED = "generalized"
    TRIANGULAR = "triangular"
    STIGLER_TRAPEZOID = "stigler_trapezoid"
    HARD_TRIM = "hard_trim"


def trim_count(n: int, fraction: float) -> int:
    """Return ``floor(n * fraction)``, robust to binary representation error.

    ``0.29 * 100`` evaluates to ``28.999999999999996`` in floating point; the
    small slack keeps such products on the intended integer.
    """
    return int(math.floor(n * fraction + 1e-9))


@dataclass(frozen=True)
class WeightSpec:
    """A weight family together with its trimming and smoothing proportions.

    ``gamma`` is only meaningful for the generalized family and is ignored by
    the others.
    """

    kind: WeightKind = WeightKind.GENERALIZED
    alpha: float = 0.1
    gamma: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if not 0.0 <= self.alpha < 0.5:
            raise ParameterDomainError(f"alpha must lie in [0, 0.5), got {self.alpha}")
        if self.kind is WeightKind.GENERALIZED and not self.alpha < self.gamma <= 0.5:
            raise ParameterDomainError(
                f"gamma must lie in (alpha, 0.5] = ({self.alpha}, 0.5], got {self.gamma}"
            )

    @classmethod
    def generalized(cls, alpha: float, gamma: float) -> WeightSpec:
        return cls(WeightKind.GENERALIZED, alpha, gamma)

    @property
    def total_mass(self) -> float:
        """Integral of the weight function over [0, 1]."""
        a = self.alpha
        if self.kind is WeightKind.GENERALIZED:
            return 1.0 - a - self.gamma
        if self.kind is WeightKind.TRIANGULAR:
            return 0.5 - a
        if self.kind is WeightKind.STIGLER_TRAPEZOID:
            h = 2.0 / (2.0 - 3.0 * a)
            return h * (1.0 - 1.5 * a)
        return 1.0 - 2.0 * a

    @property
    def k_pop(self) -> float:
        """Population normaliser ``1 / integral(J)``."""
        return 1.0 / self.total_mass


def _eval(u: np.ndarray, spec: WeightSpec) -> np.ndarray:
    a = spec.alpha
    out = np.zeros_like(u)
    if spec.kind is WeightKind.GENERALIZED:
        g = spec.gamma
        ramp_up = (u >= a) & (u < g)
        flat = (u >= g) & (u <= 1.0 - g)
        ramp_down = (u > 1.0 - g) & (u <= 1.0 - a)
        out[ramp_up] = (u[ramp_up] - a) / (g - a)
        out[flat] = 1.0
        out[ramp_down] = np.maximum((1.0 - u[ramp_down] - a) / (g - a), 0.0)
    elif spec.kind is WeightKind.TRIANGULAR:
        up = (u >= a) & (u <= 0.5)
        down = (u > 0.5) & (u <= 1.0 - a)
        out[up] = (u[up] - a) / (0.5 - a)
        out[down] = np.maximum((1.0 - u[down] - a) / (0.5 - a), 0.0)
    elif spec.kind is WeightKind.STIGLER_TRAPEZOID:
        h = 2.0 / (2.0 - 3.0 * a)
        half = a / 2.0
        flat = (u >= a) & (u <= 1.0 - a)
        up = (u >= half) & (u < a)
        down = (u > 1.0 - a) & (u <= 1.0 - half)
        out[flat] = h
        if a > 0:
            out[up] = (u[up] - half) * 2.0 * h / a
            out[down] = np.maximum((1.0 - half - u[down]) * 2.0 * h / a, 0.0)
    else:
        out[(u > a) & (u < 1.0 - a)] = 1.0
    return out


def eval_weight(u, spec: WeightSpec):
    """Evaluate the weight function ``J(u)``; accepts scalars or arrays."""
    arr = np.asarray(u, dtype=float)
    out = _eval(np.atleast_1d(arr), spec)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


@dataclass(frozen=True)
class DiscreteWeights:
    """Weights ``J(i/(n+1))`` attached to the order statistics of a size-``n`` sample.

    Attributes
    ----------
    raw : ndarray
        ``J(i/(n+1))`` for ``i = 1..n``.
    normalized : ndarray
        ``raw / raw.sum()``.
    K : float
        ``n / raw.sum()``.
    support : tuple of int
        Zero-based inclusive index range ``(first, last)`` of positive weights.
    """

    raw: np.ndarray
    normalized: np.ndarray
    K: float
    support: tuple

    @property
    def n(self) -> int:
        return self.raw.size


@functools.lru_cache(maxsize=512)
def _discrete_weights(n: int, spec: WeightSpec) -> DiscreteWeights:
    i = np.arange(1, n + 1)
    # every family is symmetric: evaluate on the lower half only so that
    # w_i == w_{n+1-i} holds bit for bit
    raw = _eval(np.minimum(i, n + 1 - i) / (n + 1.0), spec)
    total = raw.sum()
    if total <= 0:
        raise DegenerateWeightsError(f"all weights vanish for n={n} and {spec}")
    normalized = raw / total
    positive = np.flatnonzero(raw > 0)
    raw.setflags(write=False)
    normalized.setflags(write=False)
    return DiscreteWeights(raw, normalized, n / total, (int(positive[0]), int(positive[-1])))


def discrete_weights(n: int, spec: WeightSpec) -> DiscreteWeights:
    """Discretise ``spec`` on the grid ``i/(n+1)``; results are cached and read-only."""
    if n < 4:
        raise ParameterDomainError(f"need n >= 4 for discrete weights, got {n}")
    return _discrete_weights(int(n), spec)
