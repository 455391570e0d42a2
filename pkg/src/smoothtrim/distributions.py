"""Gaussian mixtures, quantile functions and reproducible random streams.

Random numbers come from NumPy's PCG64 bit generator (128-bit LCG state with
an XSL-RR output permutation) and normal variates from NumPy's ziggurat
sampler, so a given seed reproduces the same sample on every platform.
"""
from __future__ import annotations

import re
import zlib
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ParameterDomainError
from .estimators import SortedSample
from .quadrature import integrate, integrate_intervals
from .weights import WeightKind, WeightSpec, eval_weight

__all__ = [
    "MixtureModel",
    "parse_mixture",
    "PRESETS",
    "CONTAMINATED_10",
    "CONTAMINATED_20",
    "THREE_POINT",
    "STANDARD_NORMAL",
    "QuantileFunction",
    "EmpiricalQuantile",
    "as_quantile_function",
    "mixture_cdf",
    "mixture_quantile",
    "mixture_sample",
    "stm_true_mean",
    "make_rng",
]


def make_rng(seed, *keys) -> np.random.Generator:
    """PCG64 generator for the stream identified by ``(seed, *keys)``.

    String keys are reduced with CRC-32 so that stream identities are stable
    across processes and Python hash randomisation.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    spawn = tuple(zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in keys)
    ss = np.random.SeedSequence(int(seed), spawn_key=spawn)
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class MixtureModel:
    """Finite mixture of normal distributions.

    Parameters
    ----------
    weights, means, sds : sequence of float
        Component probabilities (summing to one), means and standard
        deviations.
    """

    weights: tuple
    means: tuple
    sds: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        m = tuple(float(v) for v in self.means)
        s = tuple(float(v) for v in self.sds)
        if not (len(w) == len(m) == len(s)) or not w:
            raise ParameterDomainError("weights, means and sds must be non-empty and equally long")
        if any(v < 0 for v in w) or abs(sum(w) - 1.0) > 1e-12:
            raise ParameterDomainError(f"mixture weights must be non-negative and sum to 1, got {w}")
        if any(v <= 0 for v in s):
            raise ParameterDomainError(f"component sds must be positive, got {s}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "sds", s)

    def __str__(self):
        return "+".join(f"{w:g}*N({m:g},{s:g})" for w, m, s in zip(self.weights, self.means, self.sds))

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.means))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for w, m, s in zip(self.weights, self.means, self.sds):
            out = out + w * ndtr((x - m) / s)
        return out if out.ndim else float(out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for w, m, s in zip(self.weights, self.means, self.sds):
            out = out + w * ndtr((m - x) / s)
        return out if out.ndim else float(out)

    def quantile(self, p):
        """Inverse cdf by vectorised bisection on ``[min mean - 12 sd, max mean + 12 sd]``."""
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)) or np.isnan(p).any():
            raise ParameterDomainError("quantile probabilities must lie strictly in (0, 1)")
        spread = 12.0 * max(self.sds)
        lo = np.full(p.shape, min(self.means) - spread)
        hi = np.full(p.shape, max(self.means) + spread)
        # bisect on the survival function in the upper half so the tail keeps precision
        upper = p > 0.5
        target = np.where(upper, 1.0 - p, p)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = np.where(upper, self.sf(mid) > target, self.cdf(mid) < target)
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
                break
        out = 0.5 * (lo + hi)
        return out if out.ndim else float(out)

    def draw(self, n: int, seed=0):
        """Unsorted draw: returns ``(values, component_index)``.

        A uniform picks the component by inverse categorical cdf, then a
        standard normal is scaled and shifted.
        """
        if n < 1:
            raise ParameterDomainError(f"n must be positive, got {n}")
        rng = make_rng(seed)
        comp = np.searchsorted(np.cumsum(self.weights)[:-1], rng.random(n), side="right")
        z = rng.standard_normal(n)
        return np.asarray(self.means)[comp] + np.asarray(self.sds)[comp] * z, comp

    def sample(self, n: int, seed=0) -> SortedSample:
        return SortedSample(self.draw(n, seed)[0])


_TERM = re.compile(
    r"^\s*(?:(?P<w>[0-9.eE+-]+)\s*\*\s*)?N\(\s*(?P<m>[^,()]+?)\s*,\s*(?P<s>[^,()]+?)\s*\)\s*$"
)


def parse_mixture(text: str) -> MixtureModel:
    """Parse ``"w1*N(m1,s1)+w2*N(m2,s2)+..."`` or a preset name.

    The second argument of ``N`` is the component standard deviation, so
    ``0.9*N(0,1)+0.1*N(0,25)`` contaminates with an sd-25 normal.
    """
    key = text.strip().lower()
    if key in PRESETS:
        return PRESETS[key]
    # split on '+' that separates terms, not on signs inside numbers
    terms = re.split(r"(?<=\))\s*\+", text)
    ws, ms, ss = [], [], []
    for term in terms:
        match = _TERM.match(term)
        if match is None:
            raise ParameterDomainError(f"cannot parse mixture term {term!r} in {text!r}")
        try:
            ws.append(float(match["w"]) if match["w"] else 1.0)
            ms.append(float(match["m"]))
            ss.append(float(match["s"]))
        except ValueError as exc:
            raise ParameterDomainError(f"non-numeric mixture term {term!r}") from exc
    return MixtureModel(tuple(ws), tuple(ms), tuple(ss))


STANDARD_NORMAL = MixtureModel((1.0,), (0.0,), (1.0,))
CONTAMINATED_10 = MixtureModel((0.9, 0.1), (0.0, 0.0), (1.0, 25.0))
CONTAMINATED_20 = MixtureModel((0.8, 0.2), (0.0, 0.0), (1.0, 25.0))
THREE_POINT = MixtureModel((0.1, 0.8, 0.1), (-10.0, 0.0, 10.0), (1.0, 1.0, 1.0))

PRESETS = {
    "normal": STANDARD_NORMAL,
    "contaminated10": CONTAMINATED_10,
    "contaminated20": CONTAMINATED_20,
    "three-point": THREE_POINT,
}


def mixture_cdf(model: MixtureModel, x):
    return model.cdf(x)


def mixture_quantile(model: MixtureModel, p):
    return model.quantile(p)


def mixture_sample(model: MixtureModel, n: int, seed=0) -> SortedSample:
    return model.sample(n, seed)


class QuantileFunction:
    """A monotone quantile function with the integrals the influence machinery needs.

    Parameters
    ----------
    ppf : callable
        Vectorised ``F^{-1}`` on ``(0, 1)``.
    cdf : callable, optional
        Vectorised ``F``. When omitted it is recovered by bisection on ``ppf``.
    breakpoints : sequence of float
        Points in ``(0, 1)`` where ``ppf`` is not smooth; quadrature splits there.
    """

    def __init__(self, ppf, cdf=None, breakpoints=(), tol=1e-12):
        self._ppf = ppf
        self._cdf = cdf
        self.breakpoints = tuple(breakpoints)
        self.tol = tol

    def __call__(self, u):
        return self._ppf(u)

    def cdf(self, x):
        if self._cdf is not None:
            return self._cdf(x)
        x = np.asarray(x, dtype=float)
        lo = np.zeros(x.shape)
        hi = np.ones(x.shape)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self._ppf(mid)) <= x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def _cumulative(self, f, a, b):
        b = np.asarray(b, dtype=float)
        flat = b.ravel()
        lo, hi = min(a, flat.min(initial=a)), max(a, flat.max(initial=a))
        inner = [p for p in self.breakpoints if lo < p < hi]
        pts = np.unique(np.concatenate([[a], flat, inner]))
        pieces = integrate_intervals(f, pts[:-1], pts[1:], tol=self.tol)
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        at_a = cum[np.searchsorted(pts, a)]
        out = cum[np.searchsorted(pts, flat)] - at_a
        return out.reshape(b.shape) if b.ndim else float(out[0])

    def integral(self, a, b):
        """``int_a^b F^{-1}(u) du``; ``b`` may be an array."""
        return self._cumulative(self._ppf, a, b)

    def moment(self, a, b):
        """``int_a^b u F^{-1}(u) du``; ``b`` may be an array."""
        return self._cumulative(lambda u: u * np.asarray(self._ppf(u)), a, b)


class EmpiricalQuantile(QuantileFunction):
    """Left-continuous step quantile ``F_n^{-1}(u) = X_(ceil(n u))`` with exact integrals."""

    def __init__(self, sample):
        x = sample.values if isinstance(sample, SortedSample) else np.sort(np.asarray(sample, float))
        self.values = x
        self.n = n = x.size
        self._csum = np.concatenate([[0.0], np.cumsum(x)])
        self._cmom = np.concatenate([[0.0], np.cumsum(x * (2 * np.arange(n) + 1))]) / (2.0 * n * n)
        super().__init__(self._ppf_impl, self._cdf_impl, breakpoints=np.arange(1, n) / n)

    def _index(self, u):
        return np.clip(np.ceil(np.asarray(u, dtype=float) * self.n - 1e-9).astype(int) - 1, 0, self.n - 1)

    def _ppf_impl(self, u):
        out = self.values[self._index(u)]
        return out if np.ndim(out) else float(out)

    def _cdf_impl(self, x):
        out = np.searchsorted(self.values, x, side="right") / self.n
        return out if np.ndim(out) else float(out)

    def _split(self, u):
        t = np.clip(np.asarray(u, dtype=float), 0.0, 1.0) * self.n
        j = np.clip(np.floor(t).astype(int), 0, self.n - 1)
        return t, j

    def _G(self, u):
        t, j = self._split(u)
        return (self._csum[j] + (t - j) * self.values[j]) / self.n

    def _H(self, u):
        t, j = self._split(u)
        return self._cmom[j] + self.values[j] * (t * t - j * j) / (2.0 * self.n * self.n)

    def integral(self, a, b):
        out = self._G(b) - self._G(a)
        return out if np.ndim(out) else float(out)

    def moment(self, a, b):
        out = self._H(b) - self._H(a)
        return out if np.ndim(out) else float(out)


def as_quantile_function(obj) -> QuantileFunction:
    if isinstance(obj, QuantileFunction):
        return obj
    if isinstance(obj, MixtureModel):
        return QuantileFunction(obj.quantile, obj.cdf)
    if isinstance(obj, SortedSample):
        return EmpiricalQuantile(obj)
    if callable(obj):
        return QuantileFunction(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a quantile function")


def stm_true_mean(dist, spec: WeightSpec, tol: float = 1e-11) -> float:
    """Population target of the normalized STM: ``int J(u) F^{-1}(u) du / int J``."""
    if spec.kind is not WeightKind.GENERALIZED:
        raise ParameterDomainError("stm_true_mean requires the generalized weight family")
    qf = as_quantile_function(dist)
    a, g = spec.alpha, spec.gamma
    brk = (g, 1.0 - g) + qf.breakpoints
    value = integrate(lambda u: eval_weight(u, spec) * np.asarray(qf(u)), a, 1.0 - a, brk, tol=tol)
    return value / spec.total_mass
