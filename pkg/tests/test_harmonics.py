import numpy as np
import pytest

from indirect_sampling import (InvalidConfig, ModelConfig, OutOfRangeTime, PreconditionViolated,
                               SamplingPlan, assemble, build_Qi, check_fact_grid, check_fact_uniform,
                               evaluate_signal, gamma_matrix, grid_plan, uniform_plan)
from indirect_sampling.harmonics import dump_matrices, lambda_matrix, lambda_squared

from conftest import random_config, random_times


def cfg_of(**kw):
    base = dict(T=1.0, N1=1, N2=2, k=1, eta=0.5, sigma2=[1.0], m=[1])
    base.update(kw)
    return ModelConfig(**base)


def test_row_at_time_zero():
    np.testing.assert_array_equal(build_Qi(cfg_of(), [0.0]), [[1, 1, 0, 0]])


def test_out_of_range_time():
    with pytest.raises(OutOfRangeTime):
        build_Qi(cfg_of(), [1.0])


def test_rows_have_squared_norm_N(rng):
    for _ in range(50):
        cfg = random_config(rng)
        Q = build_Qi(cfg, rng.uniform(0, cfg.T, size=17))
        np.testing.assert_allclose(np.sum(Q**2, axis=1), cfg.N, rtol=1e-13)


def test_Qi_matches_direct_signal_evaluation(rng):
    for _ in range(20):
        cfg = random_config(rng)
        t = rng.uniform(0, cfg.T, size=9)
        x = rng.standard_normal(2 * cfg.N)
        direct = evaluate_signal(x, cfg, t)
        np.testing.assert_allclose(build_Qi(cfg, t) @ x, direct, rtol=1e-12, atol=1e-12 * np.abs(x).sum())


def test_single_signal_degenerate_case(rng):
    cfg = cfg_of(m=[5])
    s = assemble(cfg, SamplingPlan(times=[rng.uniform(0, 1, 5).tolist()]))
    np.testing.assert_array_equal(s.Qa, s.Qi[0])
    np.testing.assert_array_equal(s.Qb, s.Qi[0])


def test_assembled_structure(rng):
    for _ in range(30):
        cfg = random_config(rng)
        s = assemble(cfg, random_times(rng, cfg))
        m, n2 = cfg.total_samples, 2 * cfg.N
        assert s.Qa.shape == (m, n2) and s.Qb.shape == (m, n2 * cfg.k)
        np.testing.assert_array_equal(s.Qa, np.vstack([q.reshape(-1, n2) for q in s.Qi]))
        # direct sum: block i of Qb sits at rows of signal i, columns i*2N:(i+1)*2N
        r = 0
        for i, q in enumerate(s.Qi):
            blk = np.zeros_like(s.Qb[r : r + len(q)])
            blk[:, i * n2 : (i + 1) * n2] = q
            np.testing.assert_array_equal(s.Qb[r : r + len(q)], blk)
            r += len(q)
        np.testing.assert_allclose(np.diag(s.Qa @ s.Qa.T), cfg.N, rtol=1e-13)
        np.testing.assert_allclose(np.diag(s.Qb @ s.Qb.T), cfg.N, rtol=1e-13)
        np.testing.assert_allclose(s.CzTilde, cfg.eta * s.Qb @ s.Qb.T + s.Cz, rtol=0, atol=0)
        np.testing.assert_allclose(s.Lambda @ s.Gamma, np.eye(cfg.k), atol=1e-12)


def test_kronecker_identity(rng):
    # Qb (Lambda ⊗ I) Qb^T == Qa Qa^T + eta Qb Qb^T, both sides by direct evaluation
    for _ in range(30):
        cfg = random_config(rng)
        s = assemble(cfg, random_times(rng, cfg))
        lhs = s.Qb @ np.kron(s.Lambda, np.eye(2 * cfg.N)) @ s.Qb.T
        rhs = s.Qa @ s.Qa.T + cfg.eta * s.Qb @ s.Qb.T
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * cfg.N)


def test_gamma_k2():
    G = gamma_matrix(2, 0.5)
    np.testing.assert_allclose(G, [[1.2, -0.8], [-0.8, 1.2]], rtol=1e-14)
    np.testing.assert_allclose(lambda_matrix(2, 0.5) @ G, np.eye(2), atol=1e-15)


def test_gamma_scalar():
    assert gamma_matrix(1, 0.25)[0, 0] == pytest.approx(1 / 1.25, rel=1e-15)


def test_gamma_rejects_nonpositive_eta():
    with pytest.raises(InvalidConfig):
        gamma_matrix(3, 0.0)


def test_gamma_against_dense_inverse(rng):
    for _ in range(200):
        k = int(rng.integers(1, 12))
        eta = float(10 ** rng.uniform(-3, 2))
        L = lambda_matrix(k, eta)
        assert np.max(np.abs(L @ gamma_matrix(k, eta) - np.eye(k))) < 1e-12 * max(1, 1 / eta)
        np.testing.assert_allclose(gamma_matrix(k, eta), np.linalg.inv(L), rtol=1e-9, atol=1e-12 / eta)


def test_lambda_squared_entries():
    k, eta = 4, 0.3
    L2 = lambda_squared(k, eta)
    np.testing.assert_allclose(L2, lambda_matrix(k, eta) @ lambda_matrix(k, eta), rtol=1e-14)
    assert L2[0, 0] == pytest.approx((1 + eta) ** 2 + k - 1)
    assert L2[0, 1] == pytest.approx(2 * (1 + eta) + k - 2)


def test_prior_covariance_is_spd(rng):
    for _ in range(20):
        k, eta = int(rng.integers(1, 6)), float(10 ** rng.uniform(-2, 1))
        C = np.kron(lambda_matrix(k, eta), np.eye(4))
        np.testing.assert_array_equal(C, C.T)
        assert np.linalg.eigvalsh(C).min() >= eta - 1e-10


# grid fact


def test_grid_fact_full_grid():
    cfg = ModelConfig(T=1.0, N1=5, N2=19, k=3, eta=0.1, sigma2=[1, 2, 3], m=[4, 5, 6])
    assert check_fact_grid(cfg, grid_plan(cfg))


def test_grid_fact_rejects_off_grid():
    cfg = ModelConfig(T=1.0, N1=5, N2=19, k=2, eta=0.1, sigma2=[1, 1], m=[2, 1])
    times = [list(ts) for ts in grid_plan(cfg).times]
    times[0][1] += cfg.T / (10 * cfg.N)
    with pytest.raises(PreconditionViolated):
        check_fact_grid(cfg, SamplingPlan(times=times))


def test_grid_fact_rejects_repeated_time():
    cfg = ModelConfig(T=1.0, N1=5, N2=19, k=2, eta=0.1, sigma2=[1, 1], m=[2, 1])
    with pytest.raises(PreconditionViolated):
        check_fact_grid(cfg, SamplingPlan(times=[[0.0, 2 / 15], [2 / 15]]))


def test_grid_fact_tolerates_json_rounding():
    cfg = ModelConfig(T=3.0, N1=2, N2=8, k=2, eta=0.1, sigma2=[1, 1], m=[3, 2])
    plan = SamplingPlan(times=[[float(f"{t:.12g}") for t in ts] for ts in grid_plan(cfg).times])
    assert check_fact_grid(cfg, plan)


def test_grid_fact_any_distinct_assignment(rng):
    for _ in range(30):
        cfg = random_config(rng, low_rate=True)
        slots = rng.permutation(cfg.N)
        times, s = [], 0
        for mi in cfg.m:
            times.append((slots[s : s + mi] * cfg.T / cfg.N).tolist())
            s += mi
        assert check_fact_grid(cfg, SamplingPlan(times=times))


# uniform fact


def test_uniform_fact_at_boundary():
    cfg = ModelConfig(T=1.0, N1=5, N2=19, k=2, eta=0.1, sigma2=[1, 1], m=[39, 50])
    assert check_fact_uniform(cfg, uniform_plan(cfg))


def test_uniform_fact_excludes_m_equal_2N2():
    cfg = ModelConfig(T=1.0, N1=5, N2=19, k=1, eta=0.1, sigma2=[1], m=[38])
    with pytest.raises(PreconditionViolated):
        check_fact_uniform(cfg, uniform_plan(cfg))


def test_uniform_fact_rejects_nonuniform_plan(rng):
    cfg = ModelConfig(T=1.0, N1=1, N2=3, k=1, eta=0.1, sigma2=[1], m=[10])
    with pytest.raises(PreconditionViolated):
        check_fact_uniform(cfg, SamplingPlan(times=[np.sort(rng.uniform(0, 1, 10)).tolist()]))


def test_uniform_gram_off_diagonal_entry_vanishes():
    cfg = ModelConfig(T=2.0, N1=5, N2=19, k=1, eta=0.1, sigma2=[1], m=[41])
    Q = build_Qi(cfg, uniform_plan(cfg).times[0])
    G = Q.T @ Q
    assert abs(G[1, 2]) <= 1e-10 * 41
    assert np.max(np.abs(G - 20.5 * np.eye(30))) <= 1e-10 * 41


def test_gram_diagonal_matches_cos_sin_sums(rng):
    for _ in range(20):
        cfg = random_config(rng)
        t = rng.uniform(0, cfg.T, size=13)
        G = build_Qi(cfg, t).T @ build_Qi(cfg, t)
        ell = np.arange(cfg.N1, cfg.N2 + 1)
        cos2 = np.sum(np.cos(np.outer(t, ell) * cfg.omega) ** 2, axis=0)
        sin2 = np.sum(np.sin(np.outer(t, ell) * cfg.omega) ** 2, axis=0)
        np.testing.assert_allclose(np.diag(G), np.concatenate([cos2, sin2]), rtol=1e-12, atol=1e-12)


def test_dump_matrices(tmp_path):
    cfg = ModelConfig(T=1.0, N1=1, N2=2, k=2, eta=0.5, sigma2=[1, 2], m=[2, 1])
    s = assemble(cfg, SamplingPlan(times=[[0.0, 0.1], [0.3]]))
    paths = dump_matrices(s, str(tmp_path))
    assert {p.split("/")[-1] for p in paths} >= {"Qa.csv", "Qb.csv", "CzTilde.csv", "Gamma.csv"}
    back = np.loadtxt(tmp_path / "Qb.csv", delimiter=",")
    np.testing.assert_array_equal(back, s.Qb)
