import numpy as np
import pytest

from conftest import random_instance
from gsnica.cost import cost_log_l, sigma_tau_hat, suff_stats, value_and_grad
from gsnica.errors import DegenerateData, InsufficientData
from gsnica.gsn import GsnParams, gsn_sample
from gsnica.linalg import covariance
from gsnica.metrics import match_sources
from gsnica.optimize import FitConfig, descend, fit_ica, gradcheck, initial_point
from gsnica.synth import SUM_DIFF_MIX, make_experiment


@pytest.fixture(scope="module")
def mixed_fit():
    S, X, _ = make_experiment(4000, (3.0, 0.3), SUM_DIFF_MIX, seed=7)
    return S, X, fit_ica(X, FitConfig(restarts=2))


def test_recovers_identity_unmixing():
    p = GsnParams(m=[0, 0], W=np.eye(2), sigma=[1, 1], tau=[3.0, 0.3])
    X = gsn_sample(p, np.random.default_rng(1), 5000)
    res = fit_ica(X)
    report = match_sources(res.unmix(X), X)
    assert np.all(report.scores >= 0.95)


def test_recovers_mixed_sources(mixed_fit):
    S, X, res = mixed_fit
    report = match_sources(res.unmix(X), S)
    assert np.all(report.scores >= 0.95)
    assert res.converged


def test_trace_monotone(mixed_fit):
    _, _, res = mixed_fit
    values = [f for _, f, _ in res.trace]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert res.trace[-1][1] == res.final_log_l
    assert res.final_log_l <= res.trace[0][1]


def test_accepted_steps_satisfy_armijo():
    S, X, _ = make_experiment(1000, (3.0, 0.3), SUM_DIFF_MIX, seed=2)
    cfg = FitConfig(restarts=1)
    m0, W0 = initial_point(X, "paper")
    prev = (m0, W0)
    for k in range(1, 15):
        m, W, f, it, _, _ = descend(X, m0, W0, FitConfig(max_iter=k, restarts=1))
        if it < k:
            break
        f_prev, g = value_and_grad(X, *prev)
        step = np.concatenate([m - prev[0], (W - prev[1]).ravel()])
        gflat = g.flat()
        t = np.linalg.norm(step) / np.linalg.norm(gflat)
        # the move is along -grad
        np.testing.assert_allclose(step, -t * gflat, rtol=1e-8, atol=1e-14)
        assert f <= f_prev - cfg.armijo_c * t * (gflat @ gflat) + 1e-14
        assert f < f_prev
        prev = (m, W)


def test_deterministic():
    _, X, _ = make_experiment(1500, (3.0, 0.3), SUM_DIFF_MIX, seed=3)
    cfg = FitConfig(restarts=3, seed=11)
    a, b = fit_ica(X, cfg), fit_ica(X, cfg)
    assert np.array_equal(a.params.W, b.params.W)
    assert np.array_equal(a.params.m, b.params.m)
    assert a.final_log_l == b.final_log_l
    assert a.trace == b.trace and a.restart_index == b.restart_index


def test_restart_selection_is_minimum():
    _, X, _ = make_experiment(1500, (3.0, 0.3), SUM_DIFF_MIX, seed=4)
    res = fit_ica(X, FitConfig(restarts=4, max_iter=30))
    assert len(res.restart_log_l) == 4
    assert res.final_log_l == min(res.restart_log_l)
    assert res.restart_index == res.restart_log_l.index(res.final_log_l)


def test_whitened_descent_matches_raw_cost(mixed_fit):
    _, X, res = mixed_fit
    assert res.trace[0][1] == pytest.approx(cost_log_l(X, *initial_point(X, "paper")), rel=1e-12)


@pytest.mark.parametrize("mode", ["paper", "whiten"])
def test_scale_equivariance_init_modes(mixed_fit, mode):
    _, X, res = mixed_fit
    D = np.array([50.0, 0.01])
    scaled = fit_ica(X * D, FitConfig(restarts=1, init_mode=mode))
    assert np.all(match_sources(scaled.unmix(X * D), res.unmix(X)).scores >= 0.99)


def test_scale_equivariance(mixed_fit):
    _, X, res = mixed_fit
    D = np.array([0.2, 30.0])
    scaled = fit_ica(X * D, FitConfig(restarts=2))
    report = match_sources(scaled.unmix(X * D), res.unmix(X))
    assert np.all(report.scores >= 0.99)


def test_estimators_consistent_with_fit(mixed_fit):
    _, X, res = mixed_fit
    sigma2, tau = sigma_tau_hat(suff_stats(X, res.params.m, res.params.W))
    np.testing.assert_allclose(res.params.sigma, np.sqrt(sigma2), rtol=1e-15)
    np.testing.assert_allclose(res.params.tau, tau, rtol=1e-15)
    assert res.final_log_l == pytest.approx(cost_log_l(X, res.params.m, res.params.W), rel=1e-12)


@pytest.mark.parametrize("mode", ["paper", "whiten", "random"])
def test_max_iter_zero_returns_initialization(mode):
    _, X, _ = make_experiment(500, (3.0, 0.3), SUM_DIFF_MIX, seed=5)
    res = fit_ica(X, FitConfig(max_iter=0, restarts=1, init_mode=mode))
    rng = np.random.default_rng(np.random.SeedSequence(0).spawn(1)[0])
    m0, W0 = initial_point(X, mode, rng)
    np.testing.assert_allclose(res.params.W, W0, rtol=1e-12, atol=1e-12 * np.abs(W0).max())
    np.testing.assert_allclose(res.params.m, m0, rtol=1e-12, atol=1e-12)
    assert not res.converged and res.iterations == 0
    assert len(res.trace) == 1


def test_init_modes():
    _, X, _ = make_experiment(500, (3.0, 0.3), SUM_DIFF_MIX, seed=5)
    C = covariance(X)
    assert np.array_equal(initial_point(X, "paper")[1], C)
    Ww = initial_point(X, "whiten")[1]
    np.testing.assert_allclose(Ww.T @ C @ Ww, np.eye(2), atol=1e-10)
    Wr = initial_point(X, "random", np.random.default_rng(0))[1]
    np.testing.assert_allclose(Wr.T @ C @ Wr, np.eye(2), atol=1e-10)
    with pytest.raises(ValueError):
        initial_point(X, "random")


def test_fit_rejects_small_or_constant_data(rng):
    with pytest.raises(InsufficientData):
        fit_ica(rng.normal(size=(3, 2)))
    X = rng.normal(size=(50, 2))
    X[:, 1] = 4.0
    with pytest.raises(DegenerateData):
        fit_ica(X)


@pytest.mark.parametrize("kwargs", [
    {"backtrack": 1.0}, {"backtrack": 0.0}, {"restarts": 0}, {"grad_tol": 0.0},
    {"init_mode": "pca"}, {"max_iter": -1},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        FitConfig(**kwargs)


@pytest.mark.parametrize("d,n", [(2, 200), (3, 500)])
def test_gradcheck_random(rng, d, n):
    X, m, W = random_instance(rng, d, n)
    report = gradcheck(X, m, W, h=1e-6)
    assert report["max_rel_error"] < 1e-5
    assert report["analytic"].shape == (d + d * d,)


def test_gradcheck_symmetric_1d():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    report = gradcheck(X, [0.0], [[1.0]])
    assert report["analytic"][0] == 0.0
    assert abs(report["numeric"][0]) < 1e-8


def test_gradcheck_coarse_step_larger_error(rng):
    X, m, W = random_instance(rng, 2)
    fine = gradcheck(X, m, W, h=1e-6)["max_rel_error"]
    coarse = gradcheck(X, m, W, h=1e-1)["max_rel_error"]
    assert np.isfinite(coarse) and coarse > fine
