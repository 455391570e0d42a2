import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize, stats

from smoothtrim import (
    STANDARD_NORMAL,
    WeightSpec,
    el_confidence_interval,
    el_log_ratio,
    eval_weight,
    influence_variance_quadrature,
    scaling_constant_hat,
    smoothly_trimmed_mean,
    solve_lambda,
)
from smoothtrim.elikelihood import ELContext
from smoothtrim.errors import MuOutOfRangeError, NoRootError, ParameterDomainError

SPEC = WeightSpec.generalized(0.1, 0.3)


def test_lambda_hand_value():
    assert solve_lambda([-1.0, 2.0], [0.5, 0.5]) == pytest.approx(0.25, abs=1e-15)


def test_lambda_no_root():
    with pytest.raises(NoRootError):
        solve_lambda([1.0, 2.0, 3.0], [0.2, 0.3, 0.5])
    with pytest.raises(NoRootError):
        solve_lambda([-1.0, 2.0], [1.0, 0.0])


@given(st.lists(st.floats(-50, 50), min_size=2, max_size=40), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=200)
def test_lambda_against_brentq(W, seed):
    W = np.asarray(W)
    if W.min() >= 0 or W.max() <= 0 or min(abs(W.min()), W.max()) < 1e-6:
        return
    w = np.random.default_rng(seed).dirichlet(np.ones(W.size))
    lam = solve_lambda(W, w)
    g = lambda t: np.sum(w * W / (1 + t * W))
    lo, hi = -1 / W.max(), -1 / W.min()
    pad = 1e-12 * (hi - lo)
    ref = optimize.brentq(g, lo + pad, hi - pad, xtol=1e-15, rtol=1e-15)
    assert lam == pytest.approx(ref, rel=1e-8, abs=1e-12)
    assert abs(g(lam)) <= 1e-12 * np.sum(np.abs(w * W / (1 + lam * W))) + 1e-14


def test_log_ratio_hand_value():
    res = el_log_ratio([-5.0, -1.0, 2.0, 7.0], WeightSpec.generalized(0.25, 0.3), 0.0, scaled=False)
    assert res.lambda_ == pytest.approx(0.25, abs=1e-14)
    assert res.log_ratio == pytest.approx(2 * np.log(1.125), abs=1e-12)
    assert res.log_ratio == pytest.approx(0.235566, abs=1e-6)


@pytest.mark.filterwarnings("ignore:Values in x were outside bounds")
def test_log_ratio_matches_primal_optimum(rng):
    x = np.sort(rng.standard_t(4, size=14))
    ctx = ELContext(x, SPEC)
    v, w = ctx.values, ctx.weights
    for mu in (ctx.point - 0.3, ctx.point + 0.5):
        # maximise sum w log p subject to sum p = 1, sum p (v - mu) = 0
        cons = [{"type": "eq", "fun": lambda p: p.sum() - 1},
                {"type": "eq", "fun": lambda p: p @ (v - mu)}]
        res = optimize.minimize(lambda p: -w @ np.log(p), w, constraints=cons,
                                bounds=[(1e-12, 1)] * v.size, method="SLSQP",
                                options={"ftol": 1e-15, "maxiter": 500})
        primal = -2 * ctx.m_el * (w @ np.log(res.x / w))
        ours = ctx.evaluate(mu)
        assert ours.log_ratio == pytest.approx(primal, rel=1e-6, abs=1e-9)
        assert np.allclose(ours.probabilities, res.x, atol=1e-6)
        assert ours.probabilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_log_ratio_zero_at_point(rng):
    x = rng.normal(size=100)
    ctx = ELContext(x, SPEC)
    assert ctx.point == pytest.approx(smoothly_trimmed_mean(x, SPEC).value, abs=1e-14)
    assert ctx.evaluate(ctx.point).log_ratio <= 1e-12


def test_mu_out_of_range(rng):
    x = rng.normal(size=50)
    with pytest.raises(MuOutOfRangeError):
        el_log_ratio(x, SPEC, 100.0)


def _population_a(spec):
    J = lambda u: eval_weight(u, spec)
    a, g, mass = spec.alpha, spec.gamma, spec.total_mass
    brk = [g, 1 - g]
    m2 = integrate.quad(lambda u: J(u) * stats.norm.ppf(u) ** 2, a, 1 - a, points=brk)[0] / mass
    nD = influence_variance_quadrature(STANDARD_NORMAL, spec).value / mass ** 2
    return m2 / ((1 - 2 * a) * nD)


def test_scaling_constant_light_trimming():
    spec = WeightSpec.generalized(0.02, 0.05)
    x = STANDARD_NORMAL.sample(2000, seed=1)
    target = _population_a(spec)
    assert target == pytest.approx(0.72, abs=0.01)
    assert scaling_constant_hat(x, spec) == pytest.approx(target, abs=0.05)


def test_scaling_constant_tends_to_one():
    spec = WeightSpec.generalized(0.001, 0.002)
    x = STANDARD_NORMAL.sample(20_000, seed=1)
    assert 0.8 <= scaling_constant_hat(x, spec) <= 1.2
    assert _population_a(spec) == pytest.approx(1.0, abs=0.05)


def test_scaling_constant_invariance(rng):
    x = rng.normal(size=200)
    a = scaling_constant_hat(x, SPEC)
    assert scaling_constant_hat(2 * x, SPEC) == pytest.approx(a, rel=1e-10)
    assert scaling_constant_hat(x + 7.5, SPEC) == pytest.approx(a, rel=1e-10)


def test_scaled_statistic_affine_invariance(rng):
    x = rng.gamma(2.0, size=150)
    ctx = ELContext(x, SPEC)
    mu = ctx.point + 0.1
    c, d = 3.5, -20.0
    other = ELContext(c * x + d, SPEC)
    assert other.evaluate(c * mu + d).scaled == pytest.approx(ctx.evaluate(mu).scaled, rel=1e-8)


def test_ci_endpoints_solve_threshold(rng):
    x = rng.normal(size=300)
    ci = el_confidence_interval(x, SPEC, 0.95)
    assert not ci.clipped
    ctx = ELContext(x, SPEC)
    for end in (ci.lower, ci.upper):
        assert abs(ctx.evaluate(end).scaled - 3.841459) <= 1e-6
    assert ci.lower < ci.point < ci.upper
    assert ci.details["threshold"] == pytest.approx(3.841458820694124, abs=1e-12)


def test_ci_nested_in_level(rng):
    x = rng.standard_t(3, size=120)
    narrow = el_confidence_interval(x, SPEC, 0.8)
    wide = el_confidence_interval(x, SPEC, 0.99)
    assert wide.lower < narrow.lower < narrow.upper < wide.upper


def test_ci_clips_when_threshold_unreachable(rng, monkeypatch):
    import smoothtrim.elikelihood as el
    x = rng.normal(size=40)
    ctx = ELContext(x, SPEC)
    monkeypatch.setattr(el, "chi2_quantile", lambda level: 1e6)
    ci = el.el_confidence_interval(x, SPEC, 0.95)
    assert ci.clipped
    span = x.max() - x.min()
    assert ci.lower == pytest.approx(ctx.values[0] + 1e-9 * span, abs=1e-15)
    assert ci.upper == pytest.approx(ctx.values[-1] - 1e-9 * span, abs=1e-15)


def test_ci_level_domain(rng):
    with pytest.raises(ParameterDomainError):
        el_confidence_interval(rng.normal(size=50), SPEC, 0.4)


def test_lambda_symmetric_is_zero():
    W = np.array([-3.0, -1.0, 0.5, 1.0, 3.0, -0.5])
    w = np.array([0.1, 0.2, 0.2, 0.2, 0.1, 0.2])
    assert abs(solve_lambda(W, w)) <= 1e-15


def test_log_ratio_increases_away_from_point(rng):
    for _ in range(5):
        x = rng.standard_t(5, size=80)
        ctx = ELContext(x, SPEC)
        lo, hi = ctx.values[0], ctx.values[-1]
        up = np.linspace(ctx.point, hi, 40)[1:-1]
        down = np.linspace(ctx.point, lo, 40)[1:-1]
        for grid in (up, down):
            l = [ctx.evaluate(m, scaled=False).log_ratio for m in grid]
            assert np.all(np.diff(l) > 0)
