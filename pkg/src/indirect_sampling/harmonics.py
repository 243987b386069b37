"""Trigonometric sampling matrices and the covariance blocks built from them."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidConfig, OutOfRangeTime, PreconditionViolated
from .model import ModelConfig, SamplingPlan

GRID_TOL = 1e-9


def build_Qi(cfg: ModelConfig, times_i: Sequence[float]) -> np.ndarray:
    """Sampling matrix of one corrupted signal, shape ``(m_i, 2N)``.

    Row ``j`` is ``[cos(l w t_j) for l in N1..N2] + [sin(l w t_j) for l in N1..N2]``.
    """
    t = np.asarray(times_i, dtype=float).reshape(-1)
    if np.any((t < 0) | (t >= cfg.T)):
        raise OutOfRangeTime(f"sampling time(s) outside [0, {cfg.T})")
    phase = cfg.omega * np.outer(t, np.arange(cfg.N1, cfg.N2 + 1))
    return np.hstack([np.cos(phase), np.sin(phase)])


def gram(cfg: ModelConfig, times_i: Sequence[float], chunk: int = 65536) -> np.ndarray:
    """``Q_i^T Q_i`` accumulated in row chunks so very long plans never materialize ``Q_i``."""
    t = np.asarray(times_i, dtype=float).reshape(-1)
    G = np.zeros((2 * cfg.N, 2 * cfg.N))
    for s in range(0, t.size, chunk):
        Q = build_Qi(cfg, t[s : s + chunk])
        G += Q.T @ Q
    return G


def lambda_matrix(k: int, eta: float) -> np.ndarray:
    """Covariance of one coefficient across the k corrupted signals: ``I*eta + 1 1^T``."""
    return np.ones((k, k)) + eta * np.eye(k)


def gamma_matrix(k: int, eta: float) -> np.ndarray:
    """Closed-form inverse of :func:`lambda_matrix`."""
    if not eta > 0:
        raise InvalidConfig("eta must be > 0")
    denom = eta * (eta + k)
    a = (eta + k - 1) / denom
    b = -1.0 / denom
    return np.full((k, k), b) + (a - b) * np.eye(k)


def lambda_squared(k: int, eta: float) -> np.ndarray:
    alpha = (1 + eta) ** 2 + (k - 1)
    beta = 2 * (1 + eta) + (k - 2)
    return np.full((k, k), beta) + (alpha - beta) * np.eye(k)


@dataclass(frozen=True)
class HarmonicSystem:
    cfg: ModelConfig
    plan: SamplingPlan
    Qi: tuple[np.ndarray, ...]
    Qa: np.ndarray
    Qb: np.ndarray
    Cz: np.ndarray
    CzTilde: np.ndarray
    Lambda: np.ndarray
    Gamma: np.ndarray
    LambdaSq: np.ndarray

    @property
    def m(self) -> int:
        return self.Qa.shape[0]

    def covariance_corrupted(self) -> np.ndarray:
        """Prior covariance of the stacked corrupted coefficients, ``Lambda ⊗ I_2N``."""
        return np.kron(self.Lambda, np.eye(2 * self.cfg.N))

    def precision_corrupted(self) -> np.ndarray:
        return np.kron(self.Gamma, np.eye(2 * self.cfg.N))

    def observation_covariance(self) -> np.ndarray:
        """Covariance of the stacked observations, ``Qb (Lambda ⊗ I) Qb^T + Cz``."""
        return self.Qa @ self.Qa.T + self.CzTilde

    def matrices(self) -> dict[str, np.ndarray]:
        out = {f"Q{i + 1}": q for i, q in enumerate(self.Qi)}
        out.update(Qa=self.Qa, Qb=self.Qb, Cz=self.Cz, CzTilde=self.CzTilde,
                   Lambda=self.Lambda, Gamma=self.Gamma, LambdaSq=self.LambdaSq)
        return out


def assemble(cfg: ModelConfig, plan: SamplingPlan) -> HarmonicSystem:
    plan.check(cfg)
    n2 = 2 * cfg.N
    Qi = tuple(build_Qi(cfg, ts) for ts in plan.times)
    Qa = np.vstack(Qi) if Qi else np.zeros((0, n2))
    Qa = Qa.reshape(-1, n2)
    Qb = block_diag(*Qi) if cfg.k > 1 else Qi[0].copy()
    Qb = Qb.reshape(Qa.shape[0], n2 * cfg.k)
    Cz = np.diag(np.repeat(cfg.sigma2, cfg.m)).reshape(Qa.shape[0], Qa.shape[0])
    CzTilde = cfg.eta * Qb @ Qb.T + Cz
    return HarmonicSystem(
        cfg=cfg,
        plan=plan,
        Qi=Qi,
        Qa=Qa,
        Qb=Qb,
        Cz=Cz,
        CzTilde=CzTilde,
        Lambda=lambda_matrix(cfg.k, cfg.eta),
        Gamma=gamma_matrix(cfg.k, cfg.eta),
        LambdaSq=lambda_squared(cfg.k, cfg.eta),
    )


def grid_indices(cfg: ModelConfig, plan: SamplingPlan) -> list[list[int]]:
    """Map every time to its index on ``{0, T/N, ..., (N-1)T/N}``.

    Raises :class:`PreconditionViolated` for off-grid times.
    """
    out = []
    step = cfg.T / cfg.N
    for i, ts in enumerate(plan.times):
        row = []
        for t in ts:
            n = int(round(t / step))
            if abs(t - n * step) > GRID_TOL * cfg.T or not 0 <= n < cfg.N:
                raise PreconditionViolated(f"time {t!r} of signal {i} is not on the N-point grid")
            row.append(n)
        out.append(row)
    return out


def check_fact_grid(cfg: ModelConfig, plan: SamplingPlan) -> bool:
    """Whether distinct grid times make both Gram matrices ``N * I``."""
    plan.check(cfg)
    if cfg.total_samples > cfg.N:
        raise PreconditionViolated(f"sum of m_i = {cfg.total_samples} exceeds N = {cfg.N}")
    flat = [n for row in grid_indices(cfg, plan) for n in row]
    if len(set(flat)) != len(flat):
        raise PreconditionViolated("grid times must be distinct across all signals")
    sys_ = assemble(cfg, plan)
    target = cfg.N * np.eye(sys_.m)
    tol = 1e-10 * cfg.N
    return bool(
        np.max(np.abs(sys_.Qa @ sys_.Qa.T - target), initial=0.0) <= tol
        and np.max(np.abs(sys_.Qb @ sys_.Qb.T - target), initial=0.0) <= tol
    )


def is_uniform(cfg: ModelConfig, times_i: Sequence[float], m_i: int) -> bool:
    expected = np.arange(m_i) * cfg.T / m_i
    t = np.asarray(times_i, dtype=float)
    return t.shape == expected.shape and bool(np.all(np.abs(t - expected) <= GRID_TOL * cfg.T))


def check_fact_uniform(cfg: ModelConfig, plan: SamplingPlan) -> bool:
    """Whether uniform sampling above ``2*N2`` makes every ``Q_i^T Q_i = (m_i/2) I``."""
    plan.check(cfg)
    for i, (ts, mi) in enumerate(zip(plan.times, cfg.m)):
        if mi <= 2 * cfg.N2:
            raise PreconditionViolated(f"m[{i}] = {mi} must exceed 2*N2 = {2 * cfg.N2}")
        if not is_uniform(cfg, ts, mi):
            raise PreconditionViolated(f"signal {i} is not uniformly sampled")
    eye = np.eye(2 * cfg.N)
    return all(
        np.max(np.abs(gram(cfg, ts) - 0.5 * mi * eye)) <= 1e-10 * mi
        for ts, mi in zip(plan.times, cfg.m)
    )


def dump_matrices(sys_: HarmonicSystem, directory: str) -> list[str]:
    """Write every matrix of ``sys_`` as ``<name>.csv`` (one row per line, ``.17g``)."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, M in sys_.matrices().items():
        path = os.path.join(directory, f"{name}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in np.atleast_2d(M):
                w.writerow([format(float(v), ".17g") for v in row])
        paths.append(path)
    return paths
