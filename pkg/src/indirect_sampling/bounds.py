"""Plan-independent lower bounds on both distortions and their tightness regions."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateDenominator
from .harmonics import gamma_matrix
from .model import ModelConfig

Target = Literal["remote", "corrupted"]


@dataclass(frozen=True)
class PhiFunctionals:
    phi: tuple[float, ...]
    Phi1: float
    PhiMinus1: float
    PhiMinus2: float


def phi(cfg: ModelConfig) -> PhiFunctionals:
    """Per-signal precisions ``m_i/(2 sigma_i^2) + 1/eta`` and their power sums."""
    p = np.asarray(cfg.m, dtype=float) / (2 * np.asarray(cfg.sigma2)) + 1.0 / cfg.eta
    return PhiFunctionals(
        phi=tuple(float(v) for v in p),
        Phi1=float(p.sum()),
        PhiMinus1=float((1 / p).sum()),
        PhiMinus2=float((p**-2).sum()),
    )


@dataclass(frozen=True)
class BoundReport:
    low_branch: float
    high_branch: float
    bound: float
    tight_low: bool
    tight_high: bool
    target: str

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _grid_weight(cfg: ModelConfig) -> float:
    # sum_i m_i / (2(1+eta)N + 2 sigma_i^2)
    m = np.asarray(cfg.m, dtype=float)
    return float(np.sum(m / (2 * (1 + cfg.eta) * cfg.N + 2 * np.asarray(cfg.sigma2))))


def _regions(cfg: ModelConfig) -> tuple[bool, bool]:
    return cfg.total_samples <= cfg.N, all(mi > 2 * cfg.N2 for mi in cfg.m)


def low_rate_remote(cfg: ModelConfig) -> float:
    return cfg.N - cfg.N * _grid_weight(cfg)


def high_rate_remote(cfg: ModelConfig) -> float:
    k, eta = cfg.k, cfg.eta
    return cfg.N / ((1 + k / eta) - (k**2 / eta**2) / phi(cfg).Phi1)


def low_rate_corrupted(cfg: ModelConfig) -> float:
    k, eta, N = cfg.k, cfg.eta, cfg.N
    alpha = (1 + eta) ** 2 + (k - 1)
    return N * k * (1 + eta) - N * alpha * _grid_weight(cfg)


def high_rate_corrupted(cfg: ModelConfig) -> float:
    f = phi(cfg)
    denom = cfg.eta * (cfg.eta + cfg.k) - f.PhiMinus1
    if abs(denom) < 1e-14:
        raise DegenerateDenominator(f"eta(eta+k) - Phi_-1 = {denom!r}")
    return cfg.N * f.PhiMinus1 + cfg.N * f.PhiMinus2 / denom


def bound_remote(cfg: ModelConfig) -> BoundReport:
    lo, hi = low_rate_remote(cfg), high_rate_remote(cfg)
    tl, th = _regions(cfg)
    return BoundReport(lo, hi, max(lo, hi), tl, th, "remote")


def bound_corrupted(cfg: ModelConfig) -> BoundReport:
    lo, hi = low_rate_corrupted(cfg), high_rate_corrupted(cfg)
    tl, th = _regions(cfg)
    return BoundReport(lo, hi, max(lo, hi), tl, th, "corrupted")


def bound_for(cfg: ModelConfig, target: Target) -> BoundReport:
    if target == "remote":
        return bound_remote(cfg)
    if target == "corrupted":
        return bound_corrupted(cfg)
    raise ValueError(f"unknown target {target!r}")


def asymptotic_remote_floor(cfg: ModelConfig) -> float:
    """Remote distortion left when every corrupted signal is fully known."""
    return cfg.N / (1 + cfg.k / cfg.eta)


def closed_form_high_rate_corrupted(cfg: ModelConfig) -> float:
    """``N * Tr((Diag(m_i/(2 sigma_i^2)) + Gamma)^{-1})`` by direct k x k algebra."""
    c = np.asarray(cfg.m, dtype=float) / (2 * np.asarray(cfg.sigma2))
    A = np.diag(c) + gamma_matrix(cfg.k, cfg.eta)
    return float(cfg.N * np.trace(np.linalg.inv(A)))
