"""Monte Carlo drivers and variance-minimising parameter selection.

Every replicate draws its sample from the stream
``(seed, cell id, replicate index)``, so results do not depend on the number
of worker processes and adding cells never perturbs existing ones.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .distributions import MixtureModel, as_quantile_function, make_rng, stm_true_mean
from .elikelihood import ELContext, el_confidence_interval
from .errors import ParameterDomainError, SmoothTrimError, StudyError
from .estimators import Estimator, EstimatorKind
from .intervals import CIMethod, bootstrap_percentile_ci, normal_ci, student_t_ci
from .quadrature import integrate
from .variance import jackknife_variance, stm_variance_hat, tm_variance_hat
from .weights import WeightSpec, trim_count

__all__ = [
    "SCHEMA_VERSION",
    "Cell",
    "StudyConfig",
    "CoverageReport",
    "QuantileReport",
    "VarianceComparisonReport",
    "SelectionResult",
    "coverage_study",
    "quantile_study",
    "variance_comparison_study",
    "select_parameters",
    "DEFAULT_ALPHA_GRID",
    "default_gamma_grid",
]

SCHEMA_VERSION = "smoothtrim.report/1"
DEFAULT_ALPHA_GRID = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25)


@dataclass(frozen=True)
class Cell:
    """One estimator configuration: ``kind`` is ``"stm"``, ``"tm"`` or ``"mean"``."""

    kind: str
    alpha: float = 0.0
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("stm", "tm", "mean"):
            raise ParameterDomainError(f"unknown cell kind {self.kind!r}")
        if self.kind == "stm":
            WeightSpec.generalized(self.alpha, self.gamma)

    @property
    def label(self) -> str:
        if self.kind == "stm":
            return f"stm(alpha={self.alpha:g},gamma={self.gamma:g})"
        if self.kind == "tm":
            return f"tm(alpha={self.alpha:g})"
        return "mean"

    @property
    def spec(self) -> WeightSpec:
        return WeightSpec.generalized(self.alpha, self.gamma)

    @property
    def estimator(self) -> Estimator:
        if self.kind == "stm":
            return Estimator.stm(self.alpha, self.gamma)
        if self.kind == "tm":
            return Estimator.tm(self.alpha)
        return Estimator(EstimatorKind.MEAN)

    def supports(self, method: str) -> bool:
        method = CIMethod(method)
        if method is CIMethod.EL:
            return self.kind == "stm"
        if method is CIMethod.NORMAL:
            return self.kind in ("stm", "tm")
        if method is CIMethod.STUDENT_T:
            return self.kind == "mean"
        return True

    def truth(self, model: MixtureModel) -> float:
        """Population value the cell's estimator is consistent for."""
        if self.kind == "stm":
            return stm_true_mean(model, self.spec)
        if self.kind == "tm" and self.alpha > 0:
            qf = as_quantile_function(model)
            a = self.alpha
            return integrate(lambda u: np.asarray(qf(u)), a, 1 - a, tol=1e-11) / (1 - 2 * a)
        return model.mean

    def variance(self, x) -> float:
        """Estimator-level closed-form variance for normal intervals."""
        if self.kind == "stm":
            return stm_variance_hat(x, self.spec).value
        if self.kind == "tm":
            return tm_variance_hat(x, self.alpha).estimator_level()
        return float(np.var(x, ddof=1) / len(x))


@dataclass
class StudyConfig:
    model: MixtureModel
    n: int
    reps: int = 10_000
    cells: tuple = ()
    methods: tuple = ("normal", "el")
    level: float = 0.95
    seed: int = 0
    bootstrap_B: int = 2000
    workers: int = 1
    max_failure_rate: float = 0.02

    def __post_init__(self):
        if self.reps < 100:
            raise ParameterDomainError(f"reps must be at least 100, got {self.reps}")
        if self.n < 20:
            raise ParameterDomainError(f"n must be at least 20, got {self.n}")
        self.cells = tuple(self.cells)
        self.methods = tuple(CIMethod(m).value for m in self.methods)

    def cell_id(self, cell: Cell) -> str:
        return f"{self.model}|n={self.n}|{cell.label}"

    def draw(self, cell: Cell, rep: int) -> np.ndarray:
        return self.model.sample(self.n, make_rng(self.seed, self.cell_id(cell), rep)).values


class _Report:
    kind = "report"

    def rows(self) -> list:
        raise NotImplementedError

    def to_csv(self, fh=None) -> str:
        rows = self.rows()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def to_json(self, fh=None) -> str:
        payload = {"schema": SCHEMA_VERSION, "report": self.kind, "config": self.meta, "rows": self.rows()}
        text = json.dumps(payload, indent=2) + "\n"
        if fh is not None:
            fh.write(text)
        return text


def _meta(config: StudyConfig) -> dict:
    return {
        "model": str(config.model), "n": config.n, "reps": config.reps,
        "level": config.level, "seed": config.seed,
    }


@dataclass(frozen=True)
class CoverageCell:
    cell: str
    method: str
    reps: int
    hits: int
    misses: int
    failures: int
    coverage: float
    miss_rate: float
    failure_rate: float
    mean_length: float


@dataclass
class CoverageReport(_Report):
    cells: list
    meta: dict = field(default_factory=dict)
    kind = "coverage"

    def rows(self):
        return [asdict(c) for c in self.cells]

    def get(self, cell: str, method: str) -> CoverageCell:
        for c in self.cells:
            if c.cell == cell and c.method == method:
                return c
        raise KeyError((cell, method))


def _interval(config, cell, method, x, ctx=None):
    level = config.level
    if method == "normal":
        return normal_ci(cell.estimator(x), cell.variance(x), level)
    if method == "el":
        return el_confidence_interval(x, cell.spec, level, _context=ctx)
    if method == "boot":
        return bootstrap_percentile_ci(x, cell.estimator, level, config.bootstrap_B,
                                       seed=config.seed)
    return student_t_ci(x, level)


def _coverage_chunk(config, cell, methods, truth, start, stop):
    status = np.zeros((len(methods), stop - start), dtype=np.int8)
    length = np.full((len(methods), stop - start), np.nan)
    for j, rep in enumerate(range(start, stop)):
        x = config.draw(cell, rep)
        ctx = None
        for k, method in enumerate(methods):
            try:
                if method == "el" and ctx is None:
                    ctx = ELContext(x, cell.spec)
                ci = _interval(config, cell, method, x, ctx)
            except (SmoothTrimError, ArithmeticError, ValueError):
                status[k, j] = -1
                continue
            status[k, j] = 1 if ci.contains(truth) else 0
            length[k, j] = ci.length
    return status, length


def _chunks(reps, workers):
    size = math.ceil(reps / max(workers, 1))
    return [(s, min(s + size, reps)) for s in range(0, reps, size)]


def _run_chunks(config, fn, args):
    bounds = _chunks(config.reps, config.workers)
    if config.workers <= 1 or len(bounds) == 1:
        return [fn(*args, s, e) for s, e in bounds]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(fn, *args, s, e) for s, e in bounds]
        return [f.result() for f in futures]


def coverage_study(config: StudyConfig) -> CoverageReport:
    """Coverage and mean length of each applicable interval method per cell."""
    out = []
    for cell in config.cells:
        methods = [m for m in config.methods if cell.supports(m)]
        if not methods:
            continue
        truth = cell.truth(config.model)
        parts = _run_chunks(config, _coverage_chunk, (config, cell, methods, truth))
        status = np.concatenate([p[0] for p in parts], axis=1)
        length = np.concatenate([p[1] for p in parts], axis=1)
        for k, method in enumerate(methods):
            hits = int(np.sum(status[k] == 1))
            misses = int(np.sum(status[k] == 0))
            fails = int(np.sum(status[k] == -1))
            if fails > config.max_failure_rate * config.reps:
                raise StudyError(f"{cell.label}/{method}: {fails} of {config.reps} replicates failed")
            ok = length[k][np.isfinite(length[k])]
            out.append(CoverageCell(
                cell.label, method, config.reps, hits, misses, fails,
                hits / config.reps, misses / config.reps, fails / config.reps,
                float(ok.mean()) if ok.size else float("nan"),
            ))
    return CoverageReport(out, _meta(config))


@dataclass(frozen=True)
class QuantileCell:
    cell: str
    reps: int
    failures: int
    quantile: float


@dataclass
class QuantileReport(_Report):
    cells: list
    prob: float = 0.95
    meta: dict = field(default_factory=dict)
    kind = "quantiles"

    def rows(self):
        return [dict(asdict(c), prob=self.prob) for c in self.cells]

    def get(self, cell: str) -> QuantileCell:
        for c in self.cells:
            if c.cell == cell:
                return c
        raise KeyError(cell)


def _quantile_chunk(config, cell, truth, start, stop):
    stat = np.full(stop - start, np.nan)
    est = cell.estimator
    for j, rep in enumerate(range(start, stop)):
        x = config.draw(cell, rep)
        try:
            var = cell.variance(x)
        except (SmoothTrimError, ArithmeticError, ValueError):
            continue
        if var > 0:
            stat[j] = abs(est(x) - truth) / math.sqrt(var)
    return stat


def quantile_study(config: StudyConfig, prob: float = 0.95) -> QuantileReport:
    """Empirical ``prob`` quantile of ``|estimate - truth| / sqrt(variance)`` per cell."""
    out = []
    for cell in config.cells:
        if cell.kind == "mean":
            continue
        truth = cell.truth(config.model)
        stat = np.concatenate(_run_chunks(config, _quantile_chunk, (config, cell, truth)))
        fails = int(np.sum(~np.isfinite(stat)))
        if fails > config.max_failure_rate * config.reps:
            raise StudyError(f"{cell.label}: {fails} of {config.reps} replicates failed")
        q = float(np.quantile(stat[np.isfinite(stat)], prob))
        out.append(QuantileCell(cell.label, config.reps, fails, q))
    return QuantileReport(out, prob, _meta(config))


@dataclass(frozen=True)
class VarianceCell:
    cell: str
    n: int
    reps: int
    mean_jackknife: float
    mean_asymptotic: float
    time_ratio: float


@dataclass
class VarianceComparisonReport(_Report):
    cells: list
    meta: dict = field(default_factory=dict)
    kind = "variance_comparison"

    def rows(self):
        return [asdict(c) for c in self.cells]

    def get(self, cell: str) -> VarianceCell:
        for c in self.cells:
            if c.cell == cell:
                return c
        raise KeyError(cell)


def _variance_chunk(config, cell, start, stop):
    asym = np.empty(stop - start)
    jack = np.empty(stop - start)
    t_asym = t_jack = 0.0
    est = cell.estimator
    for j, rep in enumerate(range(start, stop)):
        x = config.draw(cell, rep)
        t0 = time.perf_counter()
        asym[j] = stm_variance_hat(x, cell.spec).value
        t1 = time.perf_counter()
        jack[j] = jackknife_variance(x, est).value
        t2 = time.perf_counter()
        t_asym += t1 - t0
        t_jack += t2 - t1
    return asym, jack, t_asym, t_jack


def variance_comparison_study(config: StudyConfig) -> VarianceComparisonReport:
    """Monte Carlo means of the jackknife and closed-form STM variances.

    ``time_ratio`` is total jackknife time over total closed-form time; it is
    informational and hardware dependent.
    """
    out = []
    for cell in config.cells:
        if cell.kind != "stm":
            continue
        parts = _run_chunks(config, _variance_chunk, (config, cell))
        asym = np.concatenate([p[0] for p in parts])
        jack = np.concatenate([p[1] for p in parts])
        t_asym = sum(p[2] for p in parts)
        t_jack = sum(p[3] for p in parts)
        out.append(VarianceCell(
            cell.label, config.n, config.reps, float(jack.mean()), float(asym.mean()),
            t_jack / t_asym if t_asym > 0 else float("inf"),
        ))
    return VarianceComparisonReport(out, _meta(config))


def default_gamma_grid(alpha: float) -> tuple:
    """``alpha + 0.05, alpha + 0.10, ..., 0.45``."""
    steps = int(round((0.45 - alpha) / 0.05))
    return tuple(round(alpha + 0.05 * k, 10) for k in range(1, steps + 1))


@dataclass
class SelectionResult(_Report):
    alpha: float
    gamma: float
    variance: object
    profile: list
    meta: dict = field(default_factory=dict)
    kind = "selection"

    def rows(self):
        return [
            {"alpha": a, "gamma": g, "variance": v, "selected": (a == self.alpha and g == self.gamma)}
            for a, g, v in self.profile
        ]


def select_parameters(sample, alpha_grid=DEFAULT_ALPHA_GRID, gamma_grid=None,
                      rel_tie: float = 1e-12) -> SelectionResult:
    """Grid argmin of the closed-form STM variance.

    ``gamma_grid`` is either a sequence shared by all alphas (pairs with
    ``gamma <= alpha`` are skipped) or ``None`` for :func:`default_gamma_grid`.
    Cells within ``rel_tie`` of the minimum count as ties, resolved towards the
    smallest alpha and then the smallest gamma.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    profile, best = [], {}
    for a in alpha_grid:
        for g in (default_gamma_grid(a) if gamma_grid is None else gamma_grid):
            if not a < g <= 0.5:
                continue
            r, m = trim_count(n, a), trim_count(n, g)
            if m <= r or n - 2 * m < 1:
                continue
            var = stm_variance_hat(x, WeightSpec.generalized(a, g))
            profile.append((float(a), float(g), var.value))
            best[(float(a), float(g))] = var
    if not profile:
        raise ParameterDomainError("no admissible (alpha, gamma) pair in the grid")
    vmin = min(v for _, _, v in profile)
    tied = [(a, g) for a, g, v in profile if v <= vmin * (1 + rel_tie) + 1e-300]
    a, g = min(tied)
    return SelectionResult(a, g, best[(a, g)], profile, {"n": n})
