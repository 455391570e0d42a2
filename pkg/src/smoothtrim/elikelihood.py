"""Empirical likelihood for the smoothly trimmed mean.

For a candidate mean ``mu`` the profile ratio is maximised over
probabilities ``p_i = w_i / (1 + lambda W_i)`` on the retained order
statistics, ``W_i = X_(i) - mu``, where ``lambda`` solves
``sum w_i W_i / (1 + lambda W_i) = 0``. The statistic
``l(mu) = 2 m sum w_i log(1 + lambda W_i)`` with ``m = n - 2r`` is
rescaled by an estimated constant ``a_hat`` so that ``a_hat l(mu)`` is
approximately chi-square(1) at the true mean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateError, MuOutOfRangeError, NoRootError, ParameterDomainError
from .estimators import as_sorted
from .intervals import CIMethod, ConfidenceInterval, chi2_quantile
from .variance import stm_variance_hat
from .weights import WeightSpec, discrete_weights, trim_count

__all__ = [
    "ELContext",
    "ELResult",
    "solve_lambda",
    "el_log_ratio",
    "scaling_constant_hat",
    "el_confidence_interval",
]

_EPS = np.finfo(float).eps


def solve_lambda(W, w, max_iter: int = 200) -> float:
    """Root of ``g(lam) = sum w_i W_i / (1 + lam W_i)``.

    ``g`` is strictly decreasing on ``(-1/max W, -1/min W)``, so the root is
    unique. Newton steps start from zero and fall back to bisection whenever
    they would leave the current bracket. Entries with zero weight are
    ignored.
    """
    W = np.asarray(W, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    keep = w > 0
    W, w = W[keep], w[keep]
    if W.size == 0 or W.min() >= 0 or W.max() <= 0:
        raise NoRootError("all centred values share one sign; no admissible lambda")
    lo, hi = -1.0 / W.max(), -1.0 / W.min()
    wW = w * W
    lam = 0.0
    for _ in range(max_iter):
        denom = 1.0 + lam * W
        terms = wW / denom
        g = terms.sum()
        if g == 0.0 or abs(g) <= 4 * _EPS * np.abs(terms).sum():
            return lam
        if g > 0:
            lo = lam
        else:
            hi = lam
        step = g / np.sum(terms * W / denom)
        new = lam + step
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if abs(new - lam) <= 2 * _EPS * abs(lam):
            return new
        lam = new
    return lam  # pragma: no cover


@dataclass(frozen=True)
class ELResult:
    mu: float
    lambda_: float
    log_ratio: float
    scaled: float
    a_hat: float
    probabilities: np.ndarray
    support: np.ndarray


class ELContext:
    """Precomputed weights and scaling for repeated evaluation on one sample.

    Weights are the normalized discrete weights restricted to indices
    ``r+1..n-r`` and renormalised; zero-weight points carry no probability
    and are dropped.
    """

    def __init__(self, sample, spec: WeightSpec):
        self.sample = as_sorted(sample)
        self.spec = spec
        x = self.sample.values
        n = x.size
        self.n = n
        self.r = r = trim_count(n, spec.alpha)
        self.m_el = n - 2 * r
        if self.m_el < 2:
            raise ParameterDomainError(f"alpha={spec.alpha} leaves fewer than two observations")
        w = discrete_weights(n, spec).normalized[r:n - r]
        keep = w > 0
        self.values = x[r:n - r][keep]
        self.weights = w[keep] / w[keep].sum()
        self.point = float(self.weights @ self.values)
        self.data_range = float(x[-1] - x[0])
        self._a_hat = None

    @property
    def a_hat(self) -> float:
        if self._a_hat is None:
            self._a_hat = scaling_constant_hat(self.sample, self.spec, _context=self)
        return self._a_hat

    def evaluate(self, mu: float, scaled: bool = True) -> ELResult:
        xs = self.values
        if not xs[0] < mu < xs[-1]:
            raise MuOutOfRangeError(
                f"mu={mu} outside the weighted data range ({xs[0]}, {xs[-1]})"
            )
        W = xs - mu
        lam = solve_lambda(W, self.weights)
        one_plus = 1.0 + lam * W
        log_ratio = max(2.0 * self.m_el * float(np.dot(self.weights, np.log1p(lam * W))), 0.0)
        a = self.a_hat if scaled else float("nan")
        return ELResult(
            float(mu), float(lam), log_ratio, a * log_ratio, a,
            self.weights / one_plus, xs,
        )

    def scaled_statistic(self, mu: float) -> float:
        return self.evaluate(mu).scaled


def el_log_ratio(sample, spec: WeightSpec, mu: float, scaled: bool = True) -> ELResult:
    """Empirical log-likelihood ratio statistic at ``mu`` together with ``a_hat``.

    With ``scaled=False`` the scaling constant is not computed (``a_hat`` and
    ``scaled`` are NaN), which allows samples too small for the closed-form
    variance.
    """
    return ELContext(sample, spec).evaluate(mu, scaled=scaled)


def scaling_constant_hat(sample, spec: WeightSpec, _context: ELContext | None = None) -> float:
    """``sigma2 / ((1 - 2 alpha) D n)`` where ``sigma2 = sum w_i (X_(i) - stm)^2`` over the
    retained indices and ``D`` is the closed-form STM variance."""
    ctx = _context or ELContext(sample, spec)
    sigma2 = float(ctx.weights @ (ctx.values - ctx.point) ** 2)
    D = stm_variance_hat(ctx.sample, spec).value
    if sigma2 <= 0 or D <= 0:
        raise DegenerateError("scaling constant undefined: retained data are constant")
    return sigma2 / ((1.0 - 2.0 * spec.alpha) * D * ctx.n)


def el_confidence_interval(sample, spec: WeightSpec, level: float = 0.95,
                           _context: ELContext | None = None) -> ConfidenceInterval:
    """Set of ``mu`` with ``a_hat l(mu) <= chi2_{level,1}``.

    Each endpoint is bracketed between the point estimate and the outermost
    retained observation (pulled in by ``1e-9`` times the data range) and
    located to ``1e-10`` times the data range. If the threshold is not
    reached inside the bracket the endpoint is clipped and flagged.
    """
    if not 0.5 < level < 1.0:
        raise ParameterDomainError(f"EL level must lie in (0.5, 1), got {level}")
    ctx = _context or ELContext(sample, spec)
    a_hat = ctx.a_hat
    threshold = chi2_quantile(level)
    span = ctx.data_range
    eps, xtol = 1e-9 * span, 1e-10 * span
    point = ctx.point

    def f(mu):
        return ctx.evaluate(mu).scaled - threshold

    endpoints, lambdas, clipped = [], [], False
    for bound in (ctx.values[0] + eps, ctx.values[-1] - eps):
        if f(bound) <= 0:
            root, clipped = bound, True
        else:
            root = brentq(f, bound, point, xtol=xtol)
        endpoints.append(float(root))
        lambdas.append(ctx.evaluate(root).lambda_)
    return ConfidenceInterval(
        endpoints[0], endpoints[1], level, CIMethod.EL, point, clipped,
        details={"a_hat": a_hat, "lambda_lower": lambdas[0], "lambda_upper": lambdas[1],
                 "threshold": threshold},
    )
