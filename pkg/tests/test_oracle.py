import numpy as np
import pytest

from bregopt import (NOISE_RESAMPLE, NOISE_SPHERE, Oracle, OracleConfig,
                     fisher_problem, make_random_market,
                     make_synthetic_rc_problem)


@pytest.fixture(scope="module")
def rc_problem():
    return make_synthetic_rc_problem(4)


@pytest.fixture(scope="module")
def market_problem():
    mkt = make_random_market(3, 3, 2, 8, seed=1)
    return fisher_problem(mkt, reference_optimum=False, certificate_samples=50)


def test_noiseless_oracle_returns_exact_gradient(rc_problem):
    oracle = Oracle(rc_problem)
    x = rc_problem.geometry.center()
    for t in range(5):
        np.testing.assert_array_equal(oracle.query(x, t), rc_problem.gradient(x))


def test_sphere_noise_is_bounded_always(rc_problem):
    sigma = 0.7
    oracle = Oracle(rc_problem, OracleConfig(sigma=sigma, noise_kind=NOISE_SPHERE, seed=3))
    x = rc_problem.geometry.center()
    g = rc_problem.gradient(x)
    for t in range(2000):
        u = oracle.query(x, t) - g
        assert np.linalg.norm(u) <= sigma + 1e-15
        assert np.max(np.abs(u)) <= sigma + 1e-15  # dual-norm bound for l1 geometries


def test_sphere_noise_zero_mean(rc_problem):
    sigma = 1.0
    d = rc_problem.dimension
    oracle = Oracle(rc_problem, OracleConfig(sigma=sigma, noise_kind=NOISE_SPHERE, seed=4))
    x = rc_problem.geometry.center()
    g = rc_problem.gradient(x)
    draws = np.vstack([oracle.query(x, t) - g for t in range(100_000)])
    mean = draws.mean(axis=0)
    assert np.linalg.norm(mean) <= 3.0 * sigma / np.sqrt(draws.shape[0]) * np.sqrt(d)
    stderr = draws.std(axis=0, ddof=1) / np.sqrt(draws.shape[0])
    assert np.all(np.abs(mean) <= 4.0 * stderr)


def test_signal_stream_reproducible(rc_problem):
    cfg = OracleConfig(sigma=0.5, noise_kind=NOISE_SPHERE, seed=9)
    a, b = Oracle(rc_problem, cfg), Oracle(rc_problem, cfg)
    x = rc_problem.geometry.center()
    for t in (0, 1, 7, 1000):
        np.testing.assert_array_equal(a.query(x, t), b.query(x, t))
    # calls are pure in (seed, t): order does not matter
    np.testing.assert_array_equal(a.query(x, 3), b.query(x, 3))
    other = Oracle(rc_problem, OracleConfig(sigma=0.5, noise_kind=NOISE_SPHERE, seed=10))
    assert not np.array_equal(a.query(x, 3), other.query(x, 3))


def test_resample_channel_perturbs_utilities(market_problem):
    cfg = OracleConfig(sigma=None, noise_kind=NOISE_RESAMPLE, seed=5, rel_width=0.2)
    oracle = Oracle(market_problem, cfg)
    u = market_problem.market.u
    u1 = oracle.utilities_at(1)
    assert np.all(np.abs(u1 / u - 1.0) <= 0.2)
    np.testing.assert_array_equal(u1, oracle.utilities_at(1))
    assert not np.array_equal(u1, oracle.utilities_at(2))
    x = market_problem.geometry.center()
    np.testing.assert_array_equal(oracle.query(x, 1), oracle.query(x, 1))


def test_resample_sigma_estimate_cached(market_problem):
    cfg = OracleConfig(sigma=None, noise_kind=NOISE_RESAMPLE, seed=6, rel_width=0.1)
    oracle = Oracle(market_problem, cfg)
    est = oracle.estimated_sigma(probes=200)
    assert est > 0.0
    assert oracle.estimated_sigma(probes=9999) == est  # cached
    assert oracle.metadata()["sigma"] == est


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(sigma=0.0, noise_kind=NOISE_SPHERE)
    with pytest.raises(ValueError):
        OracleConfig(sigma=1.0, noise_kind="none")
    with pytest.raises(ValueError):
        OracleConfig(sigma=None, noise_kind=NOISE_RESAMPLE, rel_width=1.5)
    with pytest.raises(ValueError):
        OracleConfig(sigma=1.0, noise_kind=NOISE_RESAMPLE, rel_width=0.1)
    with pytest.raises(ValueError):
        OracleConfig(sigma=1.0, noise_kind=NOISE_SPHERE, seed=-1)


def test_resample_needs_market(rc_problem):
    cfg = OracleConfig(sigma=None, noise_kind=NOISE_RESAMPLE, seed=1, rel_width=0.1)
    with pytest.raises(ValueError):
        Oracle(rc_problem, cfg)
