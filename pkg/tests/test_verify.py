import numpy as np
import pytest

from indirect_sampling import InvalidConfig, ModelConfig, SamplingPlan, distortion, uniform_plan
from indirect_sampling import verify as vf


def test_permutation_matrix_is_commutation_matrix(rng):
    for m, n in [(2, 3), (1, 4), (3, 3), (4, 2)]:
        P = vf.permutation_matrix(m, n)
        X = rng.standard_normal((m, n))
        # vec stacks columns
        np.testing.assert_array_equal(P @ X.flatten(order="F"), X.T.flatten(order="F"))
        np.testing.assert_array_equal(P @ P.T, np.eye(m * n))


def test_kron_permutation_exact():
    assert vf.check_kron_permutation(2, 3)
    assert vf.check_kron_permutation(4, 1, seed=5)


def test_det_closed_form_k2():
    a, b = [1.5, 2.0], 0.7
    assert vf.det_equicorrelated(a, b) == pytest.approx(1.5 * 2.0 - 0.7**2, rel=1e-14)


def test_det_closed_form_without_coupling():
    a = [0.5, 2.0, 3.0, 1.25]
    assert vf.det_equicorrelated(a, 1e-14) == pytest.approx(np.prod(a), rel=1e-12)


def test_det_closed_form_random(rng):
    for _ in range(100):
        a, b = rng.uniform(0.1, 3, size=int(rng.integers(1, 7))), float(rng.uniform(0, 2))
        M = vf.equicorrelated_matrix(a, b)
        np.testing.assert_allclose(np.diag(M), a, rtol=0, atol=1e-14)
        assert np.all(M[~np.eye(a.size, dtype=bool)] == -b)
        assert vf.det_equicorrelated(a, b) == pytest.approx(np.linalg.det(M), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("name", sorted(vf.SUITES))
def test_suite_passes_and_is_deterministic(name):
    a = vf.run_trials(name, vf.SUITES[name], seed=11, trials=150)
    b = vf.run_trials(name, vf.SUITES[name], seed=11, trials=150)
    assert a.passed and a.max_violation <= vf.TOLERANCE
    assert a == b


@pytest.mark.parametrize("name", sorted(vf.SUITES))
def test_replay_reproduces_worst_instance(name):
    r = vf.run_trials(name, vf.SUITES[name], seed=3, trials=40)
    rows = vf.replay(name, r.worst_instance_seed)
    assert max(row["violation"] for row in rows) == r.max_violation


def test_false_inequality_is_reported():
    r = vf.run_trials("bogus", lambda rng: [("1 <= 0", 1.0, 0.0)], seed=0, trials=5)
    assert not r.passed and r.max_violation == pytest.approx(0.5)
    assert r.to_dict()["passed"] is False


def test_replay_unknown_suite():
    with pytest.raises(InvalidConfig):
        vf.replay("nope", 1)


def test_subseeds_are_distinct():
    seeds = {vf.subseed(7, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert vf.subseed(7, 3) == vf.subseed(7, 3)


def test_named_wrappers_match_registry():
    assert vf.check_det_formula(5, 20) == vf.run_trials("det_formula", vf.det_formula_trial, 5, 20)
    assert vf.check_am_hm(5, 20).name == "am_hm"
    assert len(vf.run_inequality_suites(1, 5)) == 6


# Monte Carlo


def small_cfg(m=(7, 9)):
    return ModelConfig(T=1.0, N1=1, N2=3, k=2, eta=0.3, sigma2=[0.5, 2.0], m=list(m))


def test_monte_carlo_without_samples():
    cfg = small_cfg((0, 0))
    r = vf.monte_carlo(cfg, uniform_plan(cfg), 4000, seed=2)
    assert r.analytic_Da == pytest.approx(cfg.N)
    assert r.within_3se


def test_monte_carlo_agrees_with_analytic(rng):
    cfg = small_cfg()
    plan = SamplingPlan(times=[rng.uniform(0, 1, 7).tolist(), rng.uniform(0, 1, 9).tolist()])
    r = vf.monte_carlo(cfg, plan, 5000, seed=9)
    assert r.analytic_Da == distortion(cfg, plan).Da
    assert r.within_3se
    assert r.to_dict()["passed"] is True


def test_monte_carlo_batch_invariance():
    cfg = small_cfg()
    a = vf.monte_carlo(cfg, uniform_plan(cfg), 1000, seed=4, batch=4096)
    b = vf.monte_carlo(cfg, uniform_plan(cfg), 1000, seed=4, batch=97)
    assert a.empirical_Da == pytest.approx(b.empirical_Da, rel=1e-12)
    assert a.empirical_Db == pytest.approx(b.empirical_Db, rel=1e-12)


def test_monte_carlo_stderr_scaling():
    cfg = small_cfg()
    a = vf.monte_carlo(cfg, uniform_plan(cfg), 1000, seed=1)
    b = vf.monte_carlo(cfg, uniform_plan(cfg), 16000, seed=1)
    assert a.stderr_Da / b.stderr_Da == pytest.approx(4.0, rel=0.3)
    c = vf.monte_carlo(cfg, uniform_plan(cfg), 2000, seed=2)
    assert a.stderr_Da / c.stderr_Da == pytest.approx(np.sqrt(2), rel=0.3)
    assert a.stderr_Db / c.stderr_Db == pytest.approx(np.sqrt(2), rel=0.3)


def test_monte_carlo_minimum_trials():
    cfg = small_cfg()
    with pytest.raises(InvalidConfig):
        vf.monte_carlo(cfg, uniform_plan(cfg), 99, seed=1)
