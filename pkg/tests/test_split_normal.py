import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from gsnica.errors import DegenerateData
from gsnica.split_normal import SplitNormalParams, profiled_params, side_sums, sn_fit_1d, sn_logpdf, sn_pdf, sn_sample


def quad_moment(p, k):
    lo, hi = p.m - 12 * p.sigma, p.m + 12 * p.sigma * p.tau
    f = lambda x: (x - p.m) ** k * sn_pdf(x, p)  # noqa: E731
    left = integrate.quad(f, lo, p.m, epsabs=1e-13, epsrel=1e-12)[0]
    right = integrate.quad(f, p.m, hi, epsabs=1e-13, epsrel=1e-12)[0]
    return left + right


def sn_cdf(x, p):
    # closed form, cross-checked against quadrature in test_cdf_matches_quadrature
    x = np.asarray(x)
    t = p.tau
    left = 2 / (1 + t) * stats.norm.cdf((x - p.m) / p.sigma)
    right = 1 / (1 + t) + 2 * t / (1 + t) * (stats.norm.cdf((x - p.m) / (t * p.sigma)) - 0.5)
    return np.where(x <= p.m, left, right)


def test_pdf_reduces_to_standard_normal_mode():
    assert sn_pdf(0.0, SplitNormalParams(0, 1, 1)) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)


def test_pdf_at_mode_is_normalizing_constant():
    assert sn_pdf(1.5, SplitNormalParams(1.5, 4, 9)) == pytest.approx(math.sqrt(2 / math.pi) / 8, rel=1e-14)
    assert sn_pdf(1.5, SplitNormalParams(1.5, 4, 9)) == pytest.approx(0.0997356, abs=1e-7)


@pytest.mark.parametrize("tau", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
def test_pdf_normalized(sigma, tau):
    p = SplitNormalParams(0.7, sigma**2, tau**2)
    assert quad_moment(p, 0) == pytest.approx(1.0, abs=1e-8)


def test_pdf_continuous_at_mode():
    p = SplitNormalParams(2.0, 1.3, 5.0)
    below = sn_pdf(np.nextafter(2.0, -np.inf), p)
    above = sn_pdf(np.nextafter(2.0, np.inf), p)
    at = sn_pdf(2.0, p)
    assert below == pytest.approx(at, rel=1e-15) and above == pytest.approx(at, rel=1e-15)


def test_tau_one_is_normal(rng):
    p = SplitNormalParams(-0.4, 2.5, 1.0)
    x = rng.normal(size=200) * 4
    np.testing.assert_allclose(sn_pdf(x, p), stats.norm.pdf(x, -0.4, math.sqrt(2.5)), rtol=0, atol=1e-14)


def test_logpdf_at_mode():
    assert sn_logpdf(0.0, SplitNormalParams(0, 1, 1)) == pytest.approx(-0.9189385, abs=1e-7)


def test_logpdf_survives_underflow():
    p = SplitNormalParams(0, 1, 4)
    x = 40 * p.sigma * p.tau
    assert sn_pdf(x, p) == 0.0
    v = sn_logpdf(x, p)
    assert np.isfinite(v) and v < 0


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-50, 50),
    st.floats(-5, 5),
    st.floats(0.01, 100),
    st.floats(0.01, 100),
)
def test_logpdf_matches_log_of_pdf(x, m, sigma2, tau2):
    p = SplitNormalParams(m, sigma2, tau2)
    pdf = sn_pdf(x, p)
    if pdf > 1e-300:
        assert math.exp(sn_logpdf(x, p)) == pytest.approx(pdf, rel=1e-12)


def test_cdf_matches_quadrature():
    p = SplitNormalParams(0.3, 1.7, 6.0)
    for x in (-3.0, 0.0, 0.3, 1.0, 5.0):
        q = integrate.quad(lambda t: sn_pdf(t, p), p.m - 15 * p.sigma, x, points=[p.m] if x > p.m else None)[0]
        assert sn_cdf(x, p) == pytest.approx(q, abs=1e-9)


def test_sample_symmetric_mean(rng):
    xs = sn_sample(SplitNormalParams(1.0, 1.0, 1.0), rng, 100_000)
    assert abs(xs.mean() - 1.0) < 0.02


@pytest.mark.parametrize("tau2", [0.09, 9.0])
def test_sample_mean_and_left_mass(rng, tau2):
    p = SplitNormalParams(-1.0, 2.0, tau2)
    n = 100_000
    xs = sn_sample(p, rng, n)
    mu = p.m + quad_moment(p, 1)
    assert mu == pytest.approx(p.mean(), abs=1e-9)
    var = quad_moment(p, 2) - (mu - p.m) ** 2
    assert abs(xs.mean() - mu) < 3 * math.sqrt(var / n)
    left = integrate.quad(lambda t: sn_pdf(t, p), p.m - 12 * p.sigma, p.m)[0]
    assert left == pytest.approx(1 / (1 + p.tau), abs=1e-9)
    frac = np.mean(xs <= p.m)
    assert abs(frac - left) < 3 * math.sqrt(left * (1 - left) / n)


def test_sample_ks(rng):
    p = SplitNormalParams(0.5, 0.8, 6.25)
    xs = sn_sample(p, rng, 100_000)
    res = stats.kstest(xs, lambda x: sn_cdf(x, p))
    assert res.statistic < 1.63 / math.sqrt(xs.size)


def test_sample_deterministic():
    p = SplitNormalParams(0, 1, 4)
    a = sn_sample(p, np.random.default_rng(7), 1000)
    b = sn_sample(p, np.random.default_rng(7), 1000)
    assert np.array_equal(a, b)


def test_profiled_params_fixed_mode():
    # s1 = 1 + 4, s2 = 9 at m = 0
    p = profiled_params([-1.0, -2.0, 3.0], 0.0)
    assert side_sums([-1.0, -2.0, 3.0], 0.0) == (5.0, 9.0)
    assert p.sigma2 == pytest.approx(5 ** (2 / 3) * (5 ** (1 / 3) + 9 ** (1 / 3)) / 3, rel=1e-14)
    assert p.sigma2 == pytest.approx(3.694067, abs=1e-6)
    assert p.tau == pytest.approx(1.21644, abs=1e-5)


def test_fit_symmetric_data():
    q = stats.norm.ppf(np.linspace(0.01, 0.49, 60))
    xs = np.concatenate([q, -q])
    p = sn_fit_1d(xs)
    assert p.tau == 1.0
    assert abs(p.m) <= 1e-8 * np.ptp(xs)


def test_fit_tiny_uniform_sample_runs_to_edge():
    # for +-1, +-2, +-3 the profile has a local maximum at 0 and falls towards the edges
    xs = np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
    p = sn_fit_1d(xs)
    assert min(abs(p.m + 3), abs(p.m - 3)) < 6 / 512
    assert p.tau > 10 or p.tau < 0.1


@pytest.mark.parametrize("seed", [0, 1])
def test_fit_consistency(seed):
    xs = sn_sample(SplitNormalParams(0.0, 1.0, 9.0), np.random.default_rng(seed), 100_000)
    p = sn_fit_1d(xs)
    assert p.tau == pytest.approx(3.0, rel=0.05)
    assert p.sigma2 == pytest.approx(1.0, rel=0.05)


def _loglik(xs, p):
    return float(np.sum(sn_logpdf(xs, p)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 5.0), st.integers(5, 300))
def test_fit_beats_median(seed, tau, n):
    xs = sn_sample(SplitNormalParams(0.0, 1.0, tau**2), np.random.default_rng(seed), n)
    p = sn_fit_1d(xs)
    med = profiled_params(xs, float(np.median(xs)))
    assert _loglik(xs, p) >= _loglik(xs, med) - 1e-9 * abs(_loglik(xs, med))


def test_fit_rejects_constant_data():
    with pytest.raises(DegenerateData):
        sn_fit_1d([2.0, 2.0, 2.0, 2.0])
