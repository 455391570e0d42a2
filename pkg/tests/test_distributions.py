import numpy as np
import pytest
from scipy import stats

from smoothtrim import (
    CONTAMINATED_10,
    CONTAMINATED_20,
    STANDARD_NORMAL,
    THREE_POINT,
    EmpiricalQuantile,
    MixtureModel,
    WeightSpec,
    parse_mixture,
    stm_true_mean,
)
from smoothtrim.distributions import make_rng
from smoothtrim.errors import ParameterDomainError


def test_standard_normal_cdf_and_quantile():
    x = np.linspace(-6, 6, 41)
    assert np.allclose(STANDARD_NORMAL.cdf(x), stats.norm.cdf(x), atol=1e-15)
    p = np.array([1e-6, 0.01, 0.3, 0.5, 0.975, 1 - 1e-6])
    assert np.allclose(STANDARD_NORMAL.quantile(p), stats.norm.ppf(p), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("model", [CONTAMINATED_10, CONTAMINATED_20, THREE_POINT])
def test_quantile_inverts_cdf(model):
    p = np.linspace(0.001, 0.999, 199)
    assert np.max(np.abs(model.cdf(model.quantile(p)) - p)) <= 1e-12


def test_mixture_cdf_matches_scipy():
    x = np.linspace(-40, 40, 101)
    ref = 0.9 * stats.norm.cdf(x) + 0.1 * stats.norm.cdf(x, scale=25)
    assert np.allclose(CONTAMINATED_10.cdf(x), ref, atol=1e-15)


def test_three_point_gap():
    assert abs(THREE_POINT.quantile(0.100001) - THREE_POINT.quantile(0.099999)) > 1


def test_quantile_domain():
    with pytest.raises(ParameterDomainError):
        STANDARD_NORMAL.quantile(0.0)
    with pytest.raises(ParameterDomainError):
        STANDARD_NORMAL.quantile([0.5, 1.0])


def test_parse_mixture_roundtrip():
    m = parse_mixture("0.9*N(0,1)+0.1*N(0,25)")
    assert m == CONTAMINATED_10
    assert parse_mixture(str(THREE_POINT)) == THREE_POINT
    assert parse_mixture("N(0,1)") == STANDARD_NORMAL
    assert parse_mixture("0.5*N(-1.5,2) + 0.5*N(1e1,0.5)").means == (-1.5, 10.0)
    assert parse_mixture("three-point") is THREE_POINT


@pytest.mark.parametrize("text", ["0.9*N(0,1)+0.2*N(0,25)", "N(0,-1)", "0.5*T(0,1)+0.5*N(0,1)", "N(a,1)"])
def test_parse_mixture_rejects(text):
    with pytest.raises(ParameterDomainError):
        parse_mixture(text)


def test_sampler_is_deterministic():
    a = CONTAMINATED_10.sample(100, seed=7).values
    b = CONTAMINATED_10.sample(100, seed=7).values
    c = CONTAMINATED_10.sample(100, seed=8).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.all(np.diff(a) >= 0)


def test_streams_are_distinct():
    x = make_rng(1, "cell", 3).random(5)
    y = make_rng(1, "cell", 4).random(5)
    z = make_rng(1, "other", 3).random(5)
    assert not np.array_equal(x, y) and not np.array_equal(x, z)
    assert np.array_equal(x, make_rng(1, "cell", 3).random(5))


def test_sampler_moments():
    model = MixtureModel((0.8, 0.2), (0.0, 0.0), (1.0, 5.0))
    x, comp = model.draw(100_000, seed=11)
    # sd of the mean is sqrt(0.8 + 0.2 * 25) / sqrt(1e5) = 0.0076
    assert abs(x.mean()) < 0.02
    assert abs(comp.mean() - 0.2) < 4 * np.sqrt(0.16 / 1e5)
    # with the sd-25 contamination the standard error of the mean is 0.034
    y, comp = CONTAMINATED_20.draw(100_000, seed=11)
    assert abs(y.mean()) < 3 * np.sqrt(0.8 + 0.2 * 625) / np.sqrt(1e5)
    assert abs(comp.mean() - 0.2) < 4 * np.sqrt(0.16 / 1e5)
    assert abs(np.std(y[comp == 1]) - 25) < 0.5


def test_component_frequencies_three_point():
    _, comp = THREE_POINT.draw(200_000, seed=3)
    freq = np.bincount(comp, minlength=3) / comp.size
    assert np.allclose(freq, [0.1, 0.8, 0.1], atol=4 * np.sqrt(0.16 / 2e5))


def test_empirical_quantile_convention():
    q = EmpiricalQuantile([3.0, 1.0, 2.0, 4.0])
    assert q(0.25) == 1.0
    assert q(0.2500001) == 2.0
    assert q(1.0) == 4.0
    assert q(0.01) == 1.0
    assert q.cdf(2.0) == 0.5


def test_empirical_integrals_exact():
    x = np.array([-2.0, 0.5, 1.0, 7.0, 9.0])
    q = EmpiricalQuantile(x)
    from scipy.integrate import quad
    for a, b in [(0.0, 1.0), (0.1, 0.37), (0.2, 0.8), (0.33, 0.99)]:
        pts = [k / 5 for k in range(1, 5) if a < k / 5 < b]
        ref = quad(q, a, b, points=pts, limit=200)[0]
        ref_m = quad(lambda u: u * q(u), a, b, points=pts, limit=200)[0]
        assert q.integral(a, b) == pytest.approx(ref, abs=1e-10)
        assert q.moment(a, b) == pytest.approx(ref_m, abs=1e-10)


def test_stm_true_mean_symmetric_and_shifted():
    spec = WeightSpec.generalized(0.1, 0.2)
    assert abs(stm_true_mean(CONTAMINATED_10, spec)) < 1e-9
    shifted = MixtureModel((0.9, 0.1), (3.0, 3.0), (1.0, 25.0))
    assert stm_true_mean(shifted, spec) == pytest.approx(3.0, abs=1e-9)
    skew = MixtureModel((0.7, 0.3), (0.0, 4.0), (1.0, 1.0))
    from scipy.integrate import quad
    from smoothtrim import eval_weight
    ref = quad(lambda u: eval_weight(u, spec) * skew.quantile(u), 0.1, 0.9, points=[0.2, 0.8])[0] / 0.7
    assert stm_true_mean(skew, spec) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("model", [CONTAMINATED_10, CONTAMINATED_20, THREE_POINT, STANDARD_NORMAL])
def test_symmetric_model_facts(model):
    assert model.cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert model.cdf(-1e4) == 0.0 and model.cdf(1e4) == 1.0
    assert abs(model.quantile(0.5)) <= 1e-10
    p = np.round(np.arange(0.01, 1.0, 0.01), 2)
    q = model.quantile(p)
    assert np.max(np.abs(model.cdf(q) - p)) <= 1e-10
    assert np.all(np.diff(q) > 0)
    assert np.all(np.diff(model.cdf(np.linspace(-60, 60, 2001))) >= 0)


def test_stm_true_mean_uniform():
    from smoothtrim.distributions import QuantileFunction
    uniform = QuantileFunction(lambda u: np.asarray(u, float), lambda x: np.clip(x, 0.0, 1.0))
    for a, g in ((0.0, 0.5), (0.1, 0.2), (0.2, 0.45)):
        assert stm_true_mean(uniform, WeightSpec.generalized(a, g)) == pytest.approx(0.5, abs=1e-12)


def test_stm_consistency_large_sample():
    from smoothtrim import smoothly_trimmed_mean
    spec = WeightSpec.generalized(0.1, 0.2)
    x = CONTAMINATED_10.sample(100_000, seed=13)
    assert abs(smoothly_trimmed_mean(x, spec).value - stm_true_mean(CONTAMINATED_10, spec)) <= 0.01


def test_million_draw_mean_and_frequencies():
    y, comp = CONTAMINATED_20.draw(1_000_000, seed=17)
    # the contaminating component has sd 25, so the standard error is 0.0112
    se = np.sqrt(0.8 + 0.2 * 625) / 1000
    assert abs(y.mean()) <= 3 * se
    _, comp = CONTAMINATED_20.draw(100_000, seed=18)
    assert abs(np.mean(comp == 1) - 0.2) <= 0.01
