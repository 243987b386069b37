"""Problem instance, sampling plans and random realizations.

Coefficient vectors use the layout ``[A_N1..A_N2, B_N1..B_N2]`` everywhere in
the package: cosine coefficients first, then sine coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidConfig, OutOfRangeTime

_KEYS = ("T", "N1", "N2", "k", "eta", "sigma2", "m")


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def validate_config(cfg) -> None:
    """Raise :class:`InvalidConfig` naming the first violated invariant.

    ``cfg`` may be a :class:`ModelConfig` or any object/mapping exposing the
    same seven fields.
    """
    get = cfg.get if isinstance(cfg, dict) else (lambda k: getattr(cfg, k))
    missing = [k for k in _KEYS if (k not in cfg if isinstance(cfg, dict) else not hasattr(cfg, k))]
    if missing:
        raise InvalidConfig(f"missing field(s): {', '.join(missing)}")
    T, N1, N2, k, eta = get("T"), get("N1"), get("N2"), get("k"), get("eta")
    sigma2, m = get("sigma2"), get("m")

    if not (isinstance(T, (int, float)) and math.isfinite(T) and T > 0):
        raise InvalidConfig("T must be > 0")
    if not _is_int(N1) or N1 < 1:
        raise InvalidConfig("N1 must be an integer >= 1")
    if not _is_int(N2) or N2 < N1:
        raise InvalidConfig("N2 ≥ N1 required")
    if not _is_int(k) or k < 1:
        raise InvalidConfig("k must be an integer >= 1")
    if not (isinstance(eta, (int, float)) and math.isfinite(eta) and eta > 0):
        raise InvalidConfig("eta must be > 0")
    if len(sigma2) != k:
        raise InvalidConfig(f"sigma2 must have k={k} entries, got {len(sigma2)}")
    if len(m) != k:
        raise InvalidConfig(f"m must have k={k} entries, got {len(m)}")
    for i, s in enumerate(sigma2):
        if not (math.isfinite(s) and s > 0):
            raise InvalidConfig(f"sigma2[{i}] must be > 0")
    for i, mi in enumerate(m):
        if not _is_int(mi) or mi < 0:
            raise InvalidConfig(f"m[{i}] must be a non-negative integer")


@dataclass(frozen=True)
class ModelConfig:
    """Full problem instance.

    Parameters
    ----------
    T : float
        Signal period in seconds.
    N1, N2 : int
        Lowest and highest occupied harmonic.
    k : int
        Number of corrupted signals.
    eta : float
        Variance of the per-coefficient corruption.
    sigma2 : sequence of float
        Sampling-noise variance of each corrupted signal.
    m : sequence of int
        Number of samples taken from each corrupted signal.
    """

    T: float
    N1: int
    N2: int
    k: int
    eta: float
    sigma2: tuple[float, ...]
    m: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma2", tuple(float(s) for s in self.sigma2))
        object.__setattr__(self, "m", tuple(int(v) if _is_int(v) else v for v in self.m))
        validate_config(self)

    @property
    def N(self) -> int:
        return self.N2 - self.N1 + 1

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.T

    @property
    def total_samples(self) -> int:
        return sum(self.m)

    def with_m(self, m: Sequence[int]) -> "ModelConfig":
        return replace(self, m=tuple(m))

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "N1": self.N1,
            "N2": self.N2,
            "k": self.k,
            "eta": self.eta,
            "sigma2": list(self.sigma2),
            "m": list(self.m),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        validate_config(d)
        return cls(**{key: d[key] for key in _KEYS})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ModelConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SamplingPlan:
    """Per-signal sampling instants in absolute seconds."""

    times: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(tuple(float(t) for t in ts) for ts in self.times))

    def counts(self) -> tuple[int, ...]:
        return tuple(len(ts) for ts in self.times)

    def check(self, cfg: ModelConfig) -> None:
        """Raise unless the plan matches ``cfg`` (counts and time range)."""
        if len(self.times) != cfg.k:
            raise InvalidConfig(f"plan has {len(self.times)} signals, config has k={cfg.k}")
        for i, (ts, mi) in enumerate(zip(self.times, cfg.m)):
            if len(ts) != mi:
                raise InvalidConfig(f"plan gives {len(ts)} times for signal {i}, config has m={mi}")
            for t in ts:
                if not (0.0 <= t < cfg.T):
                    raise OutOfRangeTime(f"time {t!r} of signal {i} outside [0, {cfg.T})")

    def to_dict(self) -> dict:
        return {"times": [list(ts) for ts in self.times]}

    @classmethod
    def from_dict(cls, d: dict) -> "SamplingPlan":
        return cls(times=d["times"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SamplingPlan":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Realization:
    x: np.ndarray
    xi: tuple[np.ndarray, ...]
    deltas: tuple[np.ndarray, ...] = field(repr=False)


def draw_realization(cfg: ModelConfig, rng_seed: int) -> Realization:
    """Draw source coefficients and the k corruptions, deterministically per seed.

    Draw order is the source vector first, then ``deltas[0]``, ..., ``deltas[k-1]``.
    """
    rng = np.random.default_rng(rng_seed)
    n = 2 * cfg.N
    x = rng.standard_normal(n)
    xi = tuple(x + math.sqrt(cfg.eta) * rng.standard_normal(n) for _ in range(cfg.k))
    # stored as xi - x so that xi - x - delta vanishes exactly in floating point
    return Realization(x=x, xi=xi, deltas=tuple(v - x for v in xi))


def evaluate_signal(coeffs, cfg: ModelConfig, t, periodic: bool = False):
    """Evaluate ``sum_l a_l cos(l w t) + b_l sin(l w t)`` at time(s) ``t``.

    Times must lie in ``[0, T)`` unless ``periodic`` is set, in which case
    any real time is accepted.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != 2 * cfg.N:
        raise InvalidConfig(f"expected {2 * cfg.N} coefficients, got {coeffs.shape[-1]}")
    t_arr = np.asarray(t, dtype=float)
    if not periodic and np.any((t_arr < 0) | (t_arr >= cfg.T)):
        raise OutOfRangeTime(f"time(s) outside [0, {cfg.T})")
    ell = np.arange(cfg.N1, cfg.N2 + 1)
    phase = cfg.omega * np.multiply.outer(t_arr, ell)
    a, b = coeffs[: cfg.N], coeffs[cfg.N :]
    out = np.cos(phase) @ a + np.sin(phase) @ b
    return float(out) if np.ndim(out) == 0 else out
