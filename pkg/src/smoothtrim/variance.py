"""Variance machinery for trimmed and smoothly trimmed means.

Three routes to the same quantity are provided:

* closed-form plug-in estimators built from order statistics
  (:func:`tm_variance_hat`, :func:`stm_variance_hat`),
* the delete-one jackknife (:func:`jackknife_variance`),
* the population influence function integrated numerically in
  probability space (:func:`influence_function`,
  :func:`influence_variance_quadrature`).

Variances live on one of two scales. *Functional* values are asymptotic
variances of ``sqrt(n)`` times the statistic (``int IF^2 dF``); *estimator*
values approximate ``Var`` of the statistic itself. For the smoothly trimmed
mean the influence function describes the un-normalised functional
``int J(u) F^{-1}(u) du``, so converting to the normalised estimator also
multiplies by ``K_pop^2 = (1 - alpha - gamma)^{-2}``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .distributions import as_quantile_function
from .errors import OverTrimError, ParameterDomainError, ResolutionError, ScaleMismatchError
from .estimators import as_sorted
from .quadrature import integrate
from .weights import WeightKind, WeightSpec, discrete_weights, trim_count

__all__ = [
    "VarianceMethod",
    "VarianceScale",
    "VarianceEstimate",
    "InfluencePieces",
    "tm_variance_hat",
    "stm_variance_hat",
    "stm_hat_pieces",
    "jackknife_variance",
    "influence_pieces",
    "influence_function",
    "influence_variance_quadrature",
]


class VarianceMethod(str, enum.Enum):
    TM_ASYMPTOTIC = "tm_asymptotic"
    STM_ASYMPTOTIC = "stm_asymptotic"
    JACKKNIFE = "jackknife"
    THEORETICAL_QUADRATURE = "theoretical_quadrature"


class VarianceScale(str, enum.Enum):
    ESTIMATOR = "estimator"
    FUNCTIONAL = "functional"


@dataclass(frozen=True)
class VarianceEstimate:
    """A variance value tagged with how it was obtained and on which scale.

    ``normalizer`` is the factor ``c`` in
    ``estimator_level = functional_level * c**2 / n``.
    """

    value: float
    method: VarianceMethod
    scale: VarianceScale
    n: int | None = None
    normalizer: float = 1.0

    def estimator_level(self, n: int | None = None) -> float:
        if self.scale is VarianceScale.ESTIMATOR:
            return self.value
        n = n if n is not None else self.n
        if n is None:
            raise ScaleMismatchError(
                "a functional-level variance needs the sample size to become estimator-level"
            )
        return self.value * self.normalizer ** 2 / n

    def functional_level(self, n: int | None = None) -> float:
        if self.scale is VarianceScale.FUNCTIONAL:
            return self.value
        n = n if n is not None else self.n
        if n is None:
            raise ScaleMismatchError("sample size required to rescale an estimator-level variance")
        return self.value * n / self.normalizer ** 2


@dataclass(frozen=True)
class InfluencePieces:
    """Branch values of the STM influence function.

    Population pieces hold scalars for ``E4`` and ``I`` and callables of
    ``u`` for ``E1``..``E3``; sample pieces hold the per-index vectors of the
    plug-in estimator.
    """

    E1: object
    E2: object
    E3: object
    E4: float
    I: float


def _sorted_values(sample):
    return as_sorted(sample).values


def tm_variance_hat(sample, alpha: float) -> VarianceEstimate:
    """Winsorized plug-in for the asymptotic variance of the trimmed mean.

    Returns ``[sum_{r+1}^{n-r} (X_(i) - Xw)^2 + r (X_(r+1) - Xw)^2 + r (X_(n-r) - Xw)^2]
    / (n (1 - 2 alpha)^2)``, which estimates the variance of ``sqrt(n)`` times the
    trimmed mean; the result is tagged functional-level with ``n`` attached.
    """
    x = _sorted_values(sample)
    n = x.size
    if not 0.0 <= alpha < 0.5:
        raise ParameterDomainError(f"alpha must lie in [0, 0.5), got {alpha}")
    r = trim_count(n, alpha)
    if n - 2 * r < 2:
        raise OverTrimError(f"alpha={alpha} leaves fewer than two of {n} observations")
    lo, hi = x[r], x[n - r - 1]
    xw = (x[r:n - r].sum() + r * (lo + hi)) / n
    ss = np.sum((x[r:n - r] - xw) ** 2) + r * (lo - xw) ** 2 + r * (hi - xw) ** 2
    value = ss / (n * (1.0 - 2.0 * alpha) ** 2)
    return VarianceEstimate(float(value), VarianceMethod.TM_ASYMPTOTIC, VarianceScale.FUNCTIONAL, n)


def _indices(n, spec):
    if spec.kind is not WeightKind.GENERALIZED:
        raise ParameterDomainError("variance formulas exist only for the generalized weight family")
    r = trim_count(n, spec.alpha)
    m = trim_count(n, spec.gamma)
    if m <= r:
        raise ResolutionError(
            f"floor(gamma n) = {m} must exceed floor(alpha n) = {r}; increase n or gamma - alpha"
        )
    if n - 2 * m < 1:
        raise ResolutionError(f"gamma={spec.gamma} leaves no flat region at n={n}")
    return r, m


def stm_hat_pieces(sample, spec: WeightSpec) -> InfluencePieces:
    """Plug-in influence pieces: ``E1`` on ``i = r+1..m``, ``E2`` on ``m+1..n-m``,
    ``E3`` on ``n-m+1..n-r``, scalars ``E4`` and ``I``."""
    x = _sorted_values(sample)
    n = x.size
    r, m = _indices(n, spec)
    # 1-based helpers: X(i) = x[i-1], S(a, b) = X(a) + ... + X(b)
    cs = np.concatenate([[0.0], np.cumsum(x)])

    def X(i):
        return x[np.asarray(i) - 1]

    def S(a, b):
        return cs[b] - cs[a - 1]

    d = m - r
    xm1, xnm = X(m + 1), X(n - m)
    C = ((m - r) * xm1 - S(r + 1, m)) / d

    i1 = np.arange(r + 1, m + 1)
    E1 = ((i1 - r) * X(i1) - (cs[i1] - cs[r])) / d
    i2 = np.arange(m + 1, n - m + 1)
    E2 = C + X(i2) - xm1
    i3 = np.arange(n - m + 1, n - r + 1)
    E3 = C + xnm - xm1 + ((n - r) * X(i3) + (r - m) * xnm - i3 * X(i3) + (cs[i3] - cs[n - m])) / d
    E4 = C + xnm - xm1 + ((r - m) * xnm + S(n - m + 1, n - r)) / d
    I = (
        (m + m * r / n - r - m * m / n) * xm1
        - (1 + r / n) * S(r + 1, m)
        + 2.0 / n * np.dot(i1, X(i1))
        + (2 - r / n) * S(n - m + 1, n - r)
        + (r * m - m * m) / n * xnm
        - 2.0 / n * np.dot(i3, X(i3))
    ) / d + (S(m + 1, n - m) + m * xnm + (m - n) * xm1) / n
    return InfluencePieces(E1, E2, E3, float(E4), float(I))


def stm_variance_hat(sample, spec: WeightSpec) -> VarianceEstimate:
    """Closed-form estimate of ``Var`` of the normalized smoothly trimmed mean.

    ``(K^2 / n^2) [r I^2 + sum (E1 - I)^2 + sum (E2 - I)^2 + sum (E3 - I)^2 + r (E4 - I)^2]``
    with ``K = n / sum_i J(i/(n+1))``. Linear in ``n`` and vectorised.
    """
    x = _sorted_values(sample)
    n = x.size
    r, _ = _indices(n, spec)
    p = stm_hat_pieces(x, spec)
    total = (
        r * p.I ** 2
        + np.sum((p.E1 - p.I) ** 2)
        + np.sum((p.E2 - p.I) ** 2)
        + np.sum((p.E3 - p.I) ** 2)
        + r * (p.E4 - p.I) ** 2
    )
    K = discrete_weights(n, spec).K
    return VarianceEstimate(
        float(K * K * total / (n * n)),
        VarianceMethod.STM_ASYMPTOTIC,
        VarianceScale.ESTIMATOR,
        n,
        spec.k_pop,
    )


def jackknife_variance(sample, estimator) -> VarianceEstimate:
    """Delete-one jackknife ``(n-1)/n * sum (theta_(-i) - mean theta_(-.))^2``.

    ``estimator`` is any callable taking a sorted 1-D array and returning a
    float (or an object with a ``value`` attribute).
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n < 2:
        raise ParameterDomainError("jackknife needs at least two observations")
    theta = np.empty(n)
    for i in range(n):
        est = estimator(np.delete(x, i))
        theta[i] = getattr(est, "value", est)
    value = (n - 1) / n * np.sum((theta - theta.mean()) ** 2)
    return VarianceEstimate(float(value), VarianceMethod.JACKKNIFE, VarianceScale.ESTIMATOR, n)


def _require_generalized(spec):
    if spec.kind is not WeightKind.GENERALIZED:
        raise ParameterDomainError("the influence function is derived for the generalized family only")


class _Population:
    """Constants of the population influence function for one ``(F, spec)`` pair."""

    def __init__(self, qf, spec):
        _require_generalized(spec)
        self.qf = qf = as_quantile_function(qf)
        a, g = spec.alpha, spec.gamma
        self.a, self.g, self.d = a, g, g - a
        self.qa = float(qf(a)) if a > 0 else -np.inf
        self.qg = qg = float(qf(g))
        self.q1g = q1g = float(qf(1.0 - g))
        self.q1a = float(qf(1.0 - a)) if a > 0 else np.inf
        A_low = qf.integral(a, g)
        M_low = qf.moment(a, g)
        A_mid = qf.integral(g, 1.0 - g)
        A_top = qf.integral(1.0 - g, 1.0 - a)
        M_top = qf.moment(1.0 - g, 1.0 - a)
        d = self.d
        self.C = ((g - a) * qg - A_low) / d
        self.E4 = self.C + q1g - qg + ((a - g) * q1g + A_top) / d
        self.I = (
            (g + a * g - g * g - a) * qg
            - (1 + a) * A_low
            + 2 * M_low
            + (2 - a) * A_top
            + (a * g - g * g) * q1g
            - 2 * M_top
        ) / d + A_mid + q1g * g + qg * g - qg

    def E1(self, x, Fx):
        return (Fx * x - self.qf.integral(self.a, Fx) - self.a * x) / self.d

    def E2(self, x, Fx=None):
        return self.C + x - self.qg

    def E3(self, x, Fx):
        return self.C + self.q1g - self.qg + (
            (1 - self.a) * x + (self.a - self.g) * self.q1g - Fx * x
            + self.qf.integral(1.0 - self.g, Fx)
        ) / self.d


def influence_pieces(qf, spec: WeightSpec) -> InfluencePieces:
    """Population pieces; ``E1``..``E3`` are returned as functions of ``x``."""
    pop = _Population(qf, spec)
    q = pop.qf
    return InfluencePieces(
        lambda x: pop.E1(np.asarray(x, float), np.asarray(q.cdf(x), float)),
        lambda x: pop.E2(np.asarray(x, float)),
        lambda x: pop.E3(np.asarray(x, float), np.asarray(q.cdf(x), float)),
        float(pop.E4),
        float(pop.I),
    )


def _if_values(pop, x):
    x = np.asarray(x, dtype=float)
    Fx = np.asarray(pop.qf.cdf(x), dtype=float)
    out = np.full(x.shape, -pop.I)
    b1 = (x >= pop.qa) & (x < pop.qg)
    b2 = (x >= pop.qg) & (x <= pop.q1g)
    b3 = (x > pop.q1g) & (x <= pop.q1a)
    b4 = x > pop.q1a
    if b1.any():
        out[b1] = pop.E1(x[b1], Fx[b1]) - pop.I
    out[b2] = pop.E2(x[b2]) - pop.I
    if b3.any():
        out[b3] = pop.E3(x[b3], Fx[b3]) - pop.I
    out[b4] = pop.E4 - pop.I
    return out


def influence_function(x, qf, spec: WeightSpec):
    """Influence function of the (un-normalised) smoothly trimmed mean functional.

    Parameters
    ----------
    x : float or array_like
        Evaluation points.
    qf : QuantileFunction, MixtureModel or callable
        The quantile function ``F^{-1}``; a plain callable gets its cdf by
        numerical inversion.
    spec : WeightSpec
        Generalized weight specification.
    """
    pop = _Population(qf, spec)
    out = _if_values(pop, np.atleast_1d(np.asarray(x, dtype=float)))
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def influence_variance_quadrature(qf, spec: WeightSpec, n: int | None = None,
                                  tol: float = 1e-10) -> VarianceEstimate:
    """``int IF^2 dF`` evaluated in probability space.

    ``alpha I^2 + int_alpha^gamma (E1 - I)^2 du + int_gamma^{1-gamma} (E2 - I)^2 du
    + int_{1-gamma}^{1-alpha} (E3 - I)^2 du + alpha (E4 - I)^2``, where each
    branch is evaluated at ``x = F^{-1}(u)``. The result is functional-level;
    pass ``n`` to make :meth:`VarianceEstimate.estimator_level` available.
    """
    pop = _Population(qf, spec)
    q = pop.qf
    a, g, I = pop.a, pop.g, pop.I

    def branch(fn):
        def integrand(u):
            x = np.asarray(q(u), dtype=float)
            Fx = np.asarray(q.cdf(x), dtype=float)
            return (fn(x, Fx) - I) ** 2
        return integrand

    brk = q.breakpoints
    value = (
        a * I * I
        + integrate(branch(pop.E1), a, g, brk, tol=tol)
        + integrate(branch(pop.E2), g, 1.0 - g, brk, tol=tol)
        + integrate(branch(pop.E3), 1.0 - g, 1.0 - a, brk, tol=tol)
        + a * (pop.E4 - I) ** 2
    )
    return VarianceEstimate(
        float(value),
        VarianceMethod.THEORETICAL_QUADRATURE,
        VarianceScale.FUNCTIONAL,
        n,
        spec.k_pop,
    )
