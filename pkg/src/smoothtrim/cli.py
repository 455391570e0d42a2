"""Command-line interface: ``smoothtrim <subcommand> [options]``.

Exit status is 0 on success, 2 for usage and input errors, 1 for numeric
failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .distributions import parse_mixture
from .elikelihood import el_confidence_interval
from .errors import ParameterDomainError, SmoothTrimError
from .estimators import (
    Estimator,
    SortedSample,
    smoothly_trimmed_mean,
    trimmed_mean,
    winsorized_mean,
)
from .intervals import bootstrap_percentile_ci, normal_ci, student_t_ci
from .studies import (
    DEFAULT_ALPHA_GRID,
    SCHEMA_VERSION,
    Cell,
    StudyConfig,
    coverage_study,
    quantile_study,
    select_parameters,
    variance_comparison_study,
)
from .variance import jackknife_variance, stm_variance_hat, tm_variance_hat
from .weights import WeightSpec

SEED_ENV = "SMOOTHTRIM_SEED"


class InputError(Exception):
    pass


def read_column(path: str) -> SortedSample:
    """Read a single numeric column; a non-numeric first line is taken as a header."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    values = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        if len(cells) != 1:
            raise InputError(f"{path}:{lineno}: expected one column, found {len(cells)}")
        try:
            values.append(float(cells[0]))
        except ValueError:
            if lineno == 1:
                continue
            raise InputError(f"{path}:{lineno}: non-numeric value {cells[0]!r}") from None
    if not values:
        raise InputError(f"{path}: no numeric data")
    return SortedSample(values)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV}={env!r} is not an integer") from None
    return 0


def _sample(args) -> SortedSample:
    if args.input is not None:
        return read_column(args.input)
    if args.n is None:
        raise InputError("--mixture needs --n")
    return parse_mixture(args.mixture).sample(args.n, _seed(args))


def _floats(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> tuple:
    vals = _floats(text.replace(":", ","))
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected ALPHA:GAMMA, got {text!r}")
    return vals


def _emit(args, payload, rows=None):
    """Write ``payload`` as JSON, or ``rows`` (default ``[payload]``) as CSV."""
    if args.format == "csv":
        rows = rows if rows is not None else [payload]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(args) -> WeightSpec:
    if args.gamma is None:
        raise ParameterDomainError("--gamma is required for the smoothly trimmed mean")
    return WeightSpec.generalized(args.alpha, args.gamma)


def cmd_estimate(args):
    x = _sample(args)
    out = {
        "schema": SCHEMA_VERSION, "n": x.n, "alpha": args.alpha, "gamma": args.gamma,
        "trimmed_mean": trimmed_mean(x, args.alpha).value,
        "winsorized_mean": winsorized_mean(x, args.alpha).value,
    }
    if args.gamma is not None:
        spec = _spec(args)
        out["stm"] = smoothly_trimmed_mean(x, spec).value
        out["stm_raw"] = smoothly_trimmed_mean(x, spec, normalized=False).value
    _emit(args, out)


def cmd_variance(args):
    x = _sample(args)
    tm = tm_variance_hat(x, args.alpha)
    out = {
        "schema": SCHEMA_VERSION, "n": x.n, "alpha": args.alpha, "gamma": args.gamma,
        "tm_asymptotic": tm.estimator_level(),
        "tm_asymptotic_functional": tm.value,
        "tm_jackknife": jackknife_variance(x, Estimator.tm(args.alpha)).value,
    }
    if args.gamma is not None:
        spec = _spec(args)
        out["stm_asymptotic"] = stm_variance_hat(x, spec).value
        out["stm_jackknife"] = jackknife_variance(x, Estimator.stm(args.alpha, args.gamma)).value
    _emit(args, out)


def cmd_ci(args):
    x = _sample(args)
    if args.method == "t":
        ci = student_t_ci(x.values, args.level)
        estimator = "mean"
    elif args.method == "el":
        ci = el_confidence_interval(x, _spec(args), args.level)
        estimator = "stm"
    else:
        est = Estimator.tm(args.alpha) if args.estimator == "tm" else Estimator.stm(args.alpha, args.gamma)
        estimator = args.estimator
        if args.method == "normal":
            if args.estimator == "tm":
                var = tm_variance_hat(x, args.alpha)
            else:
                var = stm_variance_hat(x, _spec(args))
            ci = normal_ci(est(x.values), var, args.level)
        else:
            ci = bootstrap_percentile_ci(x.values, est, args.level, args.B, _seed(args))
    out = {"schema": SCHEMA_VERSION, "n": x.n, "estimator": estimator,
           "alpha": args.alpha, "gamma": args.gamma}
    out.update(ci.as_dict())
    _emit(args, out)


def _cells(args) -> tuple:
    cells = [Cell("stm", a, g) for a, g in (args.stm or [])]
    cells += [Cell("tm", a) for a in (args.tm or [])]
    if getattr(args, "alpha", None) is not None and getattr(args, "gamma", None) is not None:
        cells.insert(0, Cell("stm", args.alpha, args.gamma))
    if not cells:
        raise ParameterDomainError("no cells: give --alpha/--gamma, --stm or --tm")
    return tuple(cells)


def _config(args, methods=("normal",)) -> StudyConfig:
    return StudyConfig(
        parse_mixture(args.mixture), args.n, args.reps, _cells(args), methods,
        args.level, _seed(args), args.B, args.threads,
    )


def _emit_report(args, report):
    if args.format == "json":
        text = report.to_json()
    else:
        text = report.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate_coverage(args):
    _emit_report(args, coverage_study(_config(args, tuple(args.methods.split(",")))))


def cmd_simulate_quantiles(args):
    _emit_report(args, quantile_study(_config(args)))


def cmd_simulate_variance(args):
    _emit_report(args, variance_comparison_study(_config(args)))


def cmd_select(args):
    x = _sample(args)
    result = select_parameters(x.values, args.alpha_grid, args.gamma_grid)
    payload = {
        "schema": SCHEMA_VERSION, "n": x.n, "alpha": result.alpha, "gamma": result.gamma,
        "variance": result.variance.value, "profile": result.rows(),
    }
    _emit(args, payload, rows=result.rows())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothtrim",
        description="Smoothly trimmed means: estimates, variances, confidence intervals and simulations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--seed", type=int, help=f"RNG seed (fallback: ${SEED_ENV}, then 0)")

    def data(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", "-i", help="CSV file with one numeric column")
        src.add_argument("--mixture", help='simulate data, e.g. "0.9*N(0,1)+0.1*N(0,25)" (mean, sd)')
        p.add_argument("--n", type=int, help="sample size when simulating with --mixture")
        common(p)

    def params(p, gamma=None):
        p.add_argument("--alpha", type=float, default=0.1)
        p.add_argument("--gamma", type=float, default=gamma)

    p = sub.add_parser("estimate", help="trimmed, Winsorized and smoothly trimmed means")
    data(p)
    params(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("variance", help="closed-form and jackknife variance estimates")
    data(p)
    params(p)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("ci", help="confidence interval")
    data(p)
    params(p, gamma=0.2)
    p.add_argument("--method", choices=("normal", "el", "boot", "t"), default="el")
    p.add_argument("--estimator", choices=("stm", "tm"), default="stm")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--B", type=int, default=2000, help="bootstrap resamples")
    p.set_defaults(func=cmd_ci)

    def sim(p, fmt="csv", methods=False):
        p.add_argument("--mixture", required=True, help='e.g. "three-point" or "0.9*N(0,1)+0.1*N(0,25)"')
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--reps", type=int, default=10_000)
        p.add_argument("--alpha", type=float)
        p.add_argument("--gamma", type=float)
        p.add_argument("--stm", type=_pair, action="append", metavar="ALPHA:GAMMA")
        p.add_argument("--tm", type=float, action="append", metavar="ALPHA")
        p.add_argument("--level", type=float, default=0.95)
        p.add_argument("--B", type=int, default=2000)
        p.add_argument("--threads", type=int, default=1)
        if methods:
            p.add_argument("--methods", default="normal,el", help="comma list of normal,el,boot,t")
        common(p, fmt)

    p = sub.add_parser("simulate-coverage", help="Monte Carlo coverage and interval length")
    sim(p, methods=True)
    p.set_defaults(func=cmd_simulate_coverage)

    p = sub.add_parser("simulate-quantiles", help="0.95 quantiles of the standardised estimators")
    sim(p)
    p.set_defaults(func=cmd_simulate_quantiles)

    p = sub.add_parser("simulate-variance", help="mean jackknife vs closed-form variance")
    sim(p)
    p.set_defaults(func=cmd_simulate_variance)

    p = sub.add_parser("select", help="variance-minimising (alpha, gamma) over a grid")
    data(p)
    p.add_argument("--alpha-grid", type=_floats, default=DEFAULT_ALPHA_GRID)
    p.add_argument("--gamma-grid", type=_floats, default=None,
                   help="shared gamma grid (default: alpha+0.05, ..., 0.45)")
    p.set_defaults(func=cmd_select)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (InputError, ParameterDomainError) as exc:
        print(f"smoothtrim: error: {exc}", file=sys.stderr)
        return 2
    except (SmoothTrimError, ArithmeticError) as exc:
        print(f"smoothtrim: numeric failure: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())
