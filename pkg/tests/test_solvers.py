import numpy as np
import pytest

from bregopt import (DegenerateInit, EntropicGeometry, EuclideanGeometry,
                     LogBarrierGeometry, Oracle, OracleConfig, Problem,
                     SolverAbort, SolverSpec, adamir_init, adamir_step,
                     check_divergence_bound, check_regret_certificate,
                     check_step_identity, egd_step, fisher_geometry,
                     fisher_problem, make_random_market,
                     make_synthetic_rc_problem, pr_step, run)

PAPER_MARKET = dict(n=50, m=5, lo=2, hi=8, seed=1)


@pytest.fixture(scope="module")
def small_fisher():
    mkt = make_random_market(8, 4, 2, 8, seed=2)
    return fisher_problem(mkt, certificate_samples=100)


@pytest.fixture(scope="module")
def rc_problem():
    return make_synthetic_rc_problem(6)


def quadratic_problem(d=2):
    geom = EuclideanGeometry(d)
    return Problem("half-square", geom,
                   value=lambda x: 0.5 * float(np.dot(x, x)),
                   gradient=lambda x: np.asarray(x, float).copy())


# ---------------------------------------------------------------------------
# Solver spec grammar
# ---------------------------------------------------------------------------

def test_spec_parse_grammar():
    assert SolverSpec.parse("adamir", 10).kind == "adamir"
    assert SolverSpec.parse("pr", 10).label == "pr"
    spec = SolverSpec.parse("egd:0.1", 10)
    assert (spec.kind, spec.gamma) == ("egd", 0.1)
    spec = SolverSpec.parse("md-decay:1.5", 10)
    assert (spec.kind, spec.gamma) == ("md-decay", 1.5)


@pytest.mark.parametrize("bad", ["egd", "md-decay", "adamir:3", "pr:1", "newton", "egd:x"])
def test_spec_parse_rejects(bad):
    with pytest.raises(ValueError):
        SolverSpec.parse(bad, 10)


def test_spec_validates_horizon_and_gamma():
    with pytest.raises(ValueError):
        SolverSpec("adamir", 0)
    with pytest.raises(ValueError):
        SolverSpec("egd", 10, gamma=-1.0)


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def test_init_euclidean_prestart_residual():
    state = adamir_init(EuclideanGeometry(2), [0.0, 0.0], [1.0, 1.0])
    assert state.rho0_sq == pytest.approx(2.0)
    assert state.gamma == pytest.approx(1.0 / np.sqrt(2.0))
    assert state.t == 1


def test_init_rejects_coincident_points():
    with pytest.raises(DegenerateInit):
        adamir_init(EuclideanGeometry(2), [1.0, 2.0], [1.0, 2.0])


def test_init_entropic_prestart_residual():
    state = adamir_init(EntropicGeometry(2), [0.5, 0.5], [0.25, 0.75])
    assert state.rho0_sq == pytest.approx(0.2746530721670275, rel=1e-12)


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------

def test_zero_signal_leaves_iterate_fixed():
    geom = EuclideanGeometry(2)
    prob = Problem("flat", geom, value=lambda x: 0.0,
                   gradient=lambda x: np.zeros(2))
    oracle = Oracle(prob)
    state = adamir_init(geom, [0.0, 0.0], [1.0, 1.0])
    gamma_before = state.gamma
    for _ in range(5):
        adamir_step(state, geom, oracle)
        np.testing.assert_array_equal(state.x_curr, [1.0, 1.0])
        assert state.last_rho_sq == 0.0
        assert state.gamma == gamma_before


def test_euclidean_two_iteration_recursion():
    # f(x) = |x|^2/2 so the signal is the iterate itself.  From X0=(2,0),
    # X1=(1,0): rho0^2 = D(X0,X1)+D(X1,X0) = |X0-X1|^2 = 1, hence gamma_1 = 1,
    # X2 = X1 - gamma_1 X1 = 0, and rho_1^2 = |X2-X1|^2/gamma_1^2 = |X1|^2 = 1.
    prob = quadratic_problem(2)
    geom = prob.geometry
    state = adamir_init(geom, [2.0, 0.0], [1.0, 0.0])
    assert state.rho0_sq == pytest.approx(1.0)
    assert state.gamma == pytest.approx(1.0)
    adamir_step(state, geom, Oracle(prob))
    np.testing.assert_allclose(state.x_curr, [0.0, 0.0])
    assert state.last_gamma == pytest.approx(1.0)
    assert state.last_rho_sq == pytest.approx(1.0)
    # second step: gamma_2 = 1/sqrt(rho0^2 + rho1^2), zero signal at origin
    assert state.gamma == pytest.approx(1.0 / np.sqrt(2.0))
    adamir_step(state, geom, Oracle(prob))
    np.testing.assert_allclose(state.x_curr, [0.0, 0.0])
    assert state.last_rho_sq == 0.0


def test_adamir_step_on_market_equals_egd(small_fisher):
    geom = small_fisher.geometry
    mkt = small_fisher.market
    uniform = geom.center()
    other = geom.random_point(np.random.default_rng(3))
    state = adamir_init(geom, other, uniform)
    gamma1 = state.gamma
    adamir_step(state, geom, Oracle(small_fisher))
    np.testing.assert_allclose(state.x_curr, egd_step(mkt, uniform, gamma1),
                               atol=1e-12)


def test_adamir_follows_adaptive_egd_along_whole_run(small_fisher):
    geom = small_fisher.geometry
    mkt = small_fisher.market
    oracle = Oracle(small_fisher)
    rng = np.random.default_rng(4)
    state = adamir_init(geom, geom.random_point(rng), geom.center())
    for _ in range(50):
        expected = egd_step(mkt, state.x_curr, state.gamma)
        adamir_step(state, geom, oracle)
        np.testing.assert_allclose(state.x_curr, expected, atol=1e-12)


# ---------------------------------------------------------------------------
# Market baselines
# ---------------------------------------------------------------------------

def test_egd_zero_step_is_identity(small_fisher):
    b = small_fisher.geometry.random_point(np.random.default_rng(5))
    np.testing.assert_allclose(egd_step(small_fisher.market, b, 0.0), b, atol=1e-15)


def test_egd_single_cell_market():
    mkt = make_random_market(1, 1, 2, 8, seed=6)
    np.testing.assert_allclose(egd_step(mkt, [1.0], 0.7), [1.0])


def test_pr_fixed_point_at_symmetric_market():
    mkt = make_random_market(3, 3, 2, 8, seed=7)
    mkt.u[:] = 4.0
    b = np.full(9, 1.0 / 3.0)
    np.testing.assert_allclose(pr_step(mkt, b), b, atol=1e-15)


def test_pr_single_buyer_allocates_by_utility():
    mkt = make_random_market(1, 4, 2, 8, seed=8)
    b0 = np.array([0.4, 0.3, 0.2, 0.1])
    np.testing.assert_allclose(pr_step(mkt, b0), mkt.u[0] / mkt.u[0].sum(), rtol=1e-14)


def test_pr_equals_unit_step_egd_on_random_pairs():
    rng = np.random.default_rng(9)
    worst = 0.0
    for k in range(100):
        mkt = make_random_market(int(rng.integers(2, 8)), int(rng.integers(2, 6)),
                                 2, 8, seed=1000 + k)
        b = fisher_geometry(mkt).random_point(rng)
        worst = max(worst, float(np.max(np.abs(pr_step(mkt, b) - egd_step(mkt, b, 1.0)))))
    assert worst <= 1e-12


def test_pr_preserves_matrix_shape(small_fisher):
    mkt = small_fisher.market
    b = small_fisher.geometry.center().reshape(mkt.n, mkt.m)
    assert pr_step(mkt, b).shape == (mkt.n, mkt.m)
    assert egd_step(mkt, b, 0.5).shape == (mkt.n, mkt.m)


# ---------------------------------------------------------------------------
# Run harness
# ---------------------------------------------------------------------------

def test_run_single_iteration(small_fisher):
    trace = run(SolverSpec("adamir", 1), small_fisher)
    assert len(trace) == 1
    rec = trace.records()[0]
    assert rec.t == 1
    assert np.isfinite(rec.f_last) and np.isfinite(rec.f_avg)
    assert trace.meta["rho0_sq"] > 0


def test_run_deterministic_repeat(small_fisher):
    spec = SolverSpec("adamir", 50)
    a = run(spec, small_fisher)
    b = run(spec, small_fisher)
    for col in ("f_last", "f_avg", "gamma", "rho_sq", "div_to_opt"):
        np.testing.assert_array_equal(a.column(col), b.column(col))


def test_run_stochastic_repeat_same_seed(rc_problem):
    spec = SolverSpec("adamir", 50)
    cfg = OracleConfig(sigma=0.5, noise_kind="sphere-uniform", seed=11)
    a = run(spec, rc_problem, oracle=Oracle(rc_problem, cfg))
    b = run(spec, rc_problem, oracle=Oracle(rc_problem, cfg))
    np.testing.assert_array_equal(a.column("f_last"), b.column("f_last"))


def test_pr_decreases_objective_on_reference_market():
    mkt = make_random_market(**PAPER_MARKET)
    prob = fisher_problem(mkt, certificate_samples=100)
    trace = run(SolverSpec("pr", 1000), prob)
    values = trace.column("f_last")
    assert np.all(np.diff(values) <= 1e-12)


def test_step_sizes_never_increase(small_fisher, rc_problem):
    for prob in (small_fisher, rc_problem):
        for spec in (SolverSpec("adamir", 300), SolverSpec("md-decay", 300, gamma=1.0)):
            gammas = run(spec, prob).column("gamma")
            assert np.all(np.diff(gammas) <= 1e-15)


def test_decayed_md_schedule(rc_problem):
    trace = run(SolverSpec("md-decay", 25, gamma=2.0), rc_problem)
    ts = np.arange(1, 26, dtype=float)
    np.testing.assert_allclose(trace.column("gamma"), 2.0 / np.sqrt(ts), rtol=1e-15)


def test_residual_bound_deterministic_rc(rc_problem):
    bound = 2.0 * rc_problem.rc_constant ** 2
    trace = run(SolverSpec("adamir", 2000), rc_problem)
    assert trace.column("rho_sq").max() <= bound + 1e-9


def test_residual_bound_stochastic_rc(rc_problem):
    G = rc_problem.rc_constant
    K = rc_problem.geometry.modulus
    for sigma in (0.1, 1.0):
        bound = (np.sqrt(2.0) * G + np.sqrt(2.0 / K) * sigma) ** 2
        for seed in (1, 2, 3):
            cfg = OracleConfig(sigma=sigma, noise_kind="sphere-uniform", seed=seed)
            trace = run(SolverSpec("adamir", 2000), rc_problem,
                        oracle=Oracle(rc_problem, cfg))
            assert trace.column("rho_sq").max() <= bound + 1e-9


def test_step_stabilizes_on_smooth_problem(small_fisher):
    trace = run(SolverSpec("adamir", 2000), small_fisher)
    g_half = trace.value_at(1000, "gamma")
    g_full = trace.value_at(2000, "gamma")
    assert g_full > 0.0
    assert g_half - g_full <= 1e-4
    assert check_step_identity(trace) <= 1e-9


def test_regret_certificate_deterministic_runs(small_fisher, rc_problem):
    for prob in (small_fisher, rc_problem):
        trace = run(SolverSpec("adamir", 1000), prob)
        for T in (10, 100, 1000):
            assert check_regret_certificate(trace, upto=T).passed
        assert check_divergence_bound(trace).passed


def test_explicit_second_point_is_honored(small_fisher):
    geom = small_fisher.geometry
    x1 = geom.random_point(np.random.default_rng(12))
    trace = run(SolverSpec("adamir", 5), small_fisher, x1=x1)
    assert trace.meta["rho0_sq"] == pytest.approx(
        geom.symmetric_divergence(geom.center(), x1))


def test_pr_rejects_gradient_noise(small_fisher):
    cfg = OracleConfig(sigma=0.5, noise_kind="sphere-uniform", seed=1)
    with pytest.raises(ValueError):
        run(SolverSpec("pr", 10), small_fisher, oracle=Oracle(small_fisher, cfg))


def test_pr_requires_market(rc_problem):
    with pytest.raises(ValueError):
        run(SolverSpec("pr", 10), rc_problem)


def test_solver_abort_carries_partial_trace():
    geom = LogBarrierGeometry(2)
    prob = Problem("runaway", geom,
                   value=lambda x: -float(np.sum(x)),
                   gradient=lambda x: -np.ones(2))
    with pytest.raises(SolverAbort) as info:
        run(SolverSpec("adamir", 50), prob, x0=np.array([1.0, 1.0]), gamma_init=1e-4)
    trace = info.value.trace
    assert trace.failed
    assert trace.failure
