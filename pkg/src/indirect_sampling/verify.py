"""Monte Carlo validation and randomized checks of the matrix inequalities.

Each inequality suite draws independent instances from per-trial sub-seeds
derived from ``(master seed, trial index)``, so results do not depend on the
order trials are run in, and any single instance can be replayed from the
sub-seed stored in its report.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidConfig
from .estimator import distortion, gain_matrices
from .harmonics import assemble, build_Qi, lambda_matrix, lambda_squared
from .model import ModelConfig, SamplingPlan

TOLERANCE = 1e-10


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    empirical_Da: float
    empirical_Db: float
    analytic_Da: float
    analytic_Db: float
    stderr_Da: float
    stderr_Db: float

    @property
    def within_3se(self) -> bool:
        return (abs(self.empirical_Da - self.analytic_Da) <= 3 * self.stderr_Da
                and abs(self.empirical_Db - self.analytic_Db) <= 3 * self.stderr_Db)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.within_3se
        return d


def monte_carlo(cfg: ModelConfig, plan: SamplingPlan, trials: int, seed: int,
                batch: int = 4096) -> MonteCarloReport:
    """Empirical ``Da`` and ``Db`` of the LMMSE reconstruction.

    Every trial consumes one block of standard normals in the order: source
    coefficients, corruptions of signal 1..k, sampling noise of signal 1..k.
    Batching only changes how many blocks are drawn at once, not the stream.
    """
    if trials < 100:
        raise InvalidConfig("monte_carlo needs at least 100 trials")
    sys_ = assemble(cfg, plan)
    Wa, Wb = gain_matrices(sys_)
    n2, k, m = 2 * cfg.N, cfg.k, sys_.m
    noise_sd = np.sqrt(np.repeat(cfg.sigma2, cfg.m))
    rng = np.random.default_rng(seed)

    err_a = np.empty(trials)
    err_b = np.empty(trials)
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        Z = rng.standard_normal((b, n2 + n2 * k + m))
        x = Z[:, :n2]
        xs = np.tile(x, k) + math.sqrt(cfg.eta) * Z[:, n2 : n2 + n2 * k]
        y = xs @ sys_.Qb.T + Z[:, n2 + n2 * k :] * noise_sd
        err_a[done : done + b] = 0.5 * np.sum((x - y @ Wa.T) ** 2, axis=1)
        err_b[done : done + b] = 0.5 * np.sum((xs - y @ Wb.T) ** 2, axis=1)
        done += b

    rep = distortion(cfg, plan)
    return MonteCarloReport(
        trials=trials,
        empirical_Da=float(err_a.mean()),
        empirical_Db=float(err_b.mean()),
        analytic_Da=rep.Da,
        analytic_Db=rep.Db,
        stderr_Da=float(err_a.std(ddof=1) / math.sqrt(trials)),
        stderr_Db=float(err_b.std(ddof=1) / math.sqrt(trials)),
    )


# --------------------------------------------------------------------------
# Randomized inequality suites
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityTrialReport:
    name: str
    trials: int
    max_violation: float
    worst_instance_seed: int

    @property
    def passed(self) -> bool:
        return self.max_violation <= TOLERANCE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


# A trial returns rows (label, lhs, rhs[, scale]) each asserting lhs <= rhs.
TrialFn = Callable[[np.random.Generator], list]


def subseed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def _violation(row) -> float:
    lhs, rhs = row[1], row[2]
    scale = row[3] if len(row) > 3 else abs(lhs) + abs(rhs) + 1.0
    return (lhs - rhs) / scale


def run_trials(name: str, fn: TrialFn, seed: int, trials: int) -> InequalityTrialReport:
    worst, worst_seed = -math.inf, subseed(seed, 0)
    for i in range(trials):
        s = subseed(seed, i)
        v = max((_violation(r) for r in fn(np.random.default_rng(s))), default=-math.inf)
        if v > worst:
            worst, worst_seed = v, s
    return InequalityTrialReport(name, trials, float(worst), worst_seed)


def _spd(rng, n, cond_spread=3.0):
    Qm, _ = np.linalg.qr(rng.standard_normal((n, n)))
    ev = 10 ** rng.uniform(-cond_spread / 2, cond_spread / 2, size=n)
    return (Qm * ev) @ Qm.T


def _random_instance(rng, max_k=4, max_m=6):
    k = int(rng.integers(1, max_k + 1))
    N1 = int(rng.integers(1, 6))
    N = int(rng.integers(1, 8))
    m = rng.integers(0, max_m + 1, size=k)
    if m.sum() == 0:
        m[rng.integers(k)] = 1
    eta = float(10 ** rng.uniform(-2, 1))
    cfg = ModelConfig(T=1.0, N1=N1, N2=N1 + N - 1, k=k, eta=eta,
                      sigma2=10 ** rng.uniform(-2, 2, size=k), m=m.tolist())
    if m.sum() <= N and rng.random() < 0.25:
        slots = rng.permutation(N)[: m.sum()]
        times, s = [], 0
        for mi in m:
            times.append((slots[s : s + mi] * cfg.T / N).tolist())
            s += mi
    else:
        times = [rng.uniform(0, cfg.T, size=mi).tolist() for mi in m]
    return cfg, SamplingPlan(times=times)


def _diag_ratio_trace(F, G, c):
    return float(np.sum(np.diag(G) / (np.diag(F) + c)))


def reverse_majorization_trial(rng) -> list:
    cfg, plan = _random_instance(rng)
    s = assemble(cfg, plan)
    n2 = 2 * cfg.N
    c = 10 ** rng.uniform(-2, 2, size=s.m)
    C = np.diag(c)
    rows = []
    pairs = {
        "remote": (s.Qa @ s.Qa.T + cfg.eta * s.Qb @ s.Qb.T, s.Qa @ s.Qa.T),
        "corrupted": (s.Qb @ np.kron(s.Lambda, np.eye(n2)) @ s.Qb.T,
                      s.Qb @ np.kron(s.LambdaSq, np.eye(n2)) @ s.Qb.T),
    }
    # arbitrary PSD F on the same block pattern, G = F o L with 0 < a <= b
    X = rng.standard_normal((s.m, int(rng.integers(1, s.m + 2))))
    F = X @ X.T
    a = float(rng.uniform(0.1, 2.0))
    b = a * float(rng.uniform(1.0, 5.0))
    lab = np.repeat(np.arange(cfg.k), cfg.m)
    pairs["generic"] = (F, F * np.where(lab[:, None] == lab[None, :], a, b))
    for label, (F, G) in pairs.items():
        lhs = float(np.trace(np.linalg.solve(F + C, G)))
        rows.append((label, lhs, _diag_ratio_trace(F, G, c)))
    return rows


def majorization_trace_trial(rng) -> list:
    rows = []
    n = int(rng.integers(2, 9))
    A = _spd(rng, n)
    tr_inv = float(np.trace(np.linalg.inv(A)))
    rows.append(("diag 1/t", float(np.sum(1 / np.diag(A))), tr_inv))

    cuts = np.sort(rng.choice(np.arange(1, n), size=int(rng.integers(1, n)), replace=False))
    bounds = [0, *cuts.tolist(), n]
    blk = sum(float(np.trace(np.linalg.inv(A[p:q, p:q]))) for p, q in zip(bounds[:-1], bounds[1:]))
    rows.append(("block 1/t", blk, tr_inv))

    # f(t) = 1/(1 + k/eta - k^2/(eta t)) is convex on t >= k; A = sum_i (eta Q_i^T Q_i / s_i + I) >= k I
    cfg, plan = _random_instance(rng)
    k, eta = cfg.k, cfg.eta
    A2 = k * np.eye(2 * cfg.N)
    for ts, s2 in zip(plan.times, cfg.sigma2):
        Q = build_Qi(cfg, ts)
        A2 += eta * Q.T @ Q / s2

    def f(t):
        return 1.0 / (1 + k / eta - k**2 / (eta * t))

    ev = np.linalg.eigvalsh(A2)
    rows.append(("diag f on A>=kI", float(np.sum(f(np.diag(A2)))), float(np.sum(f(ev)))))
    return rows


def am_hm_trial(rng) -> list:
    k = int(rng.integers(2, 6))
    n = int(rng.integers(1, 7))
    Bs = [_spd(rng, n) for _ in range(k)]
    w = rng.dirichlet(np.ones(k))
    A = sum(wi * B for wi, B in zip(w, Bs))
    H = np.linalg.inv(sum(wi * np.linalg.inv(B) for wi, B in zip(w, Bs)))
    lam = float(np.linalg.eigvalsh(0.5 * ((A - H) + (A - H).T)).min())
    scale = float(np.linalg.norm(A, 2) + np.linalg.norm(H, 2) + 1.0)
    return [("H <= A", -lam, 0.0, scale)]


def permutation_matrix(m: int, n: int) -> np.ndarray:
    """``P(m, n) = sum_ij E_ij ⊗ E_ij^T`` with ``E_ij`` the ``m x n`` unit matrices."""
    P = np.zeros((m * n, m * n))
    for i in range(m):
        for j in range(n):
            E = np.zeros((m, n))
            E[i, j] = 1.0
            P += np.kron(E, E.T)
    return P


def _kron_gap(A: np.ndarray, B: np.ndarray) -> float:
    m, n = A.shape[0], B.shape[0]
    P = permutation_matrix(m, n)
    Pnm = permutation_matrix(n, m)
    gaps = [
        np.max(np.abs(np.kron(B, A) - P.T @ np.kron(A, B) @ P)),
        np.max(np.abs(P - Pnm.T)),
        np.max(np.abs(P @ Pnm - np.eye(m * n))),
        np.max(np.abs(P @ P.T - np.eye(m * n))),
    ]
    return float(max(gaps))


def check_kron_permutation(m: int, n: int, seed: int = 0) -> bool:
    """Permutation similarity of ``A ⊗ B`` and ``B ⊗ A`` on random square A, B."""
    rng = np.random.default_rng(seed)
    return _kron_gap(rng.standard_normal((m, m)), rng.standard_normal((n, n))) == 0.0


def kron_permutation_trial(rng) -> list:
    m, n = (int(v) for v in rng.integers(1, 6, size=2))
    A, B = rng.standard_normal((m, m)), rng.standard_normal((n, n))
    scale = float(np.max(np.abs(np.kron(A, B)))) + 1.0
    return [("B⊗A = P^T (A⊗B) P", _kron_gap(A, B), 0.0, scale)]


def trace_inverse_convexity_trial(rng) -> list:
    n = int(rng.integers(1, 8))
    B1, B2 = _spd(rng, n), _spd(rng, n)
    lhs = 2 * float(np.trace(np.linalg.inv(0.5 * (B1 + B2))))
    rhs = float(np.trace(np.linalg.inv(B1)) + np.trace(np.linalg.inv(B2)))
    return [("2 Tr B^-1 <= Tr B1^-1 + Tr B2^-1", lhs, rhs)]


def det_equicorrelated(a, b: float) -> float:
    """Determinant of the matrix with diagonal ``a`` and every off-diagonal entry ``-b``."""
    s = np.asarray(a, dtype=float) + b
    total = float(np.prod(s))
    others = sum(float(np.prod(np.delete(s, i))) for i in range(s.size))
    return total - b * others


def equicorrelated_matrix(a, b: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.full((a.size, a.size), -b) + np.diag(a + b)


def det_formula_trial(rng) -> list:
    k = int(rng.integers(1, 7))
    a = rng.uniform(0, 3, size=k)
    b = float(rng.uniform(0.01, 2))
    closed = det_equicorrelated(a, b)
    generic = float(np.linalg.det(equicorrelated_matrix(a, b)))
    return [("closed vs LU", closed, generic), ("LU vs closed", generic, closed)]


SUITES: dict[str, TrialFn] = {
    "reverse_majorization": reverse_majorization_trial,
    "majorization_trace": majorization_trace_trial,
    "am_hm": am_hm_trial,
    "kron_permutation": kron_permutation_trial,
    "trace_inverse_convexity": trace_inverse_convexity_trial,
    "det_formula": det_formula_trial,
}


def check_reverse_majorization(seed: int, trials: int) -> InequalityTrialReport:
    return run_trials("reverse_majorization", reverse_majorization_trial, seed, trials)


def check_majorization_trace(seed: int, trials: int) -> InequalityTrialReport:
    return run_trials("majorization_trace", majorization_trace_trial, seed, trials)


def check_am_hm(seed: int, trials: int) -> InequalityTrialReport:
    return run_trials("am_hm", am_hm_trial, seed, trials)


def check_trace_inverse_convexity(seed: int, trials: int) -> InequalityTrialReport:
    return run_trials("trace_inverse_convexity", trace_inverse_convexity_trial, seed, trials)


def check_det_formula(seed: int, trials: int) -> InequalityTrialReport:
    return run_trials("det_formula", det_formula_trial, seed, trials)


def check_kron_permutation_trials(seed: int, trials: int) -> InequalityTrialReport:
    return run_trials("kron_permutation", kron_permutation_trial, seed, trials)


def run_inequality_suites(seed: int, trials: int = 1000) -> list[InequalityTrialReport]:
    return [run_trials(name, fn, seed, trials) for name, fn in SUITES.items()]


def replay(name: str, instance_seed: int) -> list[dict]:
    """Re-run one instance of suite ``name`` and return every row with its violation."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise InvalidConfig(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return [
        {"label": r[0], "lhs": r[1], "rhs": r[2], "violation": _violation(r)}
        for r in fn(np.random.default_rng(instance_seed))
    ]
