"""Sampling strategies and sample-budget allocation."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator, Optional

import numpy as np

from .bounds import Target, high_rate_corrupted, high_rate_remote, low_rate_corrupted, low_rate_remote
from .errors import BudgetExceedsGrid, BudgetTooSmall, SearchSpaceTooLarge
from .model import ModelConfig, SamplingPlan

DEFAULT_SEARCH_CAP = 2_000_000


def uniform_plan(cfg: ModelConfig) -> SamplingPlan:
    return SamplingPlan(times=[[j * cfg.T / mi for j in range(mi)] for mi in cfg.m])


def grid_plan(cfg: ModelConfig) -> SamplingPlan:
    """Distinct points of the N-point grid, handed out in signal order."""
    if cfg.total_samples > cfg.N:
        raise BudgetExceedsGrid(f"sum of m_i = {cfg.total_samples} exceeds N = {cfg.N}")
    times, n = [], 0
    for mi in cfg.m:
        times.append([(n + j) * cfg.T / cfg.N for j in range(mi)])
        n += mi
    return SamplingPlan(times=times)


def random_plan(cfg: ModelConfig, seed: int) -> SamplingPlan:
    rng = np.random.default_rng(seed)
    return SamplingPlan(times=[rng.uniform(0.0, cfg.T, size=mi).tolist() for mi in cfg.m])


@dataclass(frozen=True)
class AllocationResult:
    m_alloc: tuple[int, ...]
    objective: float
    target: str
    regime: str
    enumerated: Optional[list] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["m_alloc"] = list(self.m_alloc)
        d.pop("enumerated")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _objective(cfg: ModelConfig, target: Target, regime: str):
    table = {
        ("remote", "low_rate"): low_rate_remote,
        ("corrupted", "low_rate"): low_rate_corrupted,
        ("remote", "high_rate"): high_rate_remote,
        ("corrupted", "high_rate"): high_rate_corrupted,
    }
    try:
        f = table[(target, regime)]
    except KeyError:
        raise ValueError(f"unknown target/regime {target!r}/{regime!r}") from None
    return lambda m: f(cfg.with_m(m))


def compositions(total: int, parts: int, lo: int = 0) -> Iterator[tuple[int, ...]]:
    """All ``parts``-tuples of integers ``>= lo`` summing to ``total``, lexicographic order."""
    if parts == 1:
        if total >= lo:
            yield (total,)
        return
    for first in range(lo, total - lo * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, lo):
            yield (first,) + rest


def count_compositions(total: int, parts: int, lo: int = 0) -> int:
    free = total - lo * parts
    return math.comb(free + parts - 1, parts - 1) if free >= 0 else 0


def allocate_low_rate(cfg: ModelConfig, budget: int, target: Target) -> AllocationResult:
    """Put the whole budget on the least noisy signal (lowest index on ties).

    ``cfg.m`` is ignored. In this regime both bounds are linear in each
    ``m_i`` with a slope that grows with ``sigma_i^2``.
    """
    if budget > cfg.N:
        raise BudgetExceedsGrid(f"budget {budget} exceeds N = {cfg.N}")
    best = int(np.argmin(cfg.sigma2))
    alloc = tuple(budget if i == best else 0 for i in range(cfg.k))
    return AllocationResult(alloc, _objective(cfg, target, "low_rate")(alloc), target, "low_rate")


def allocate_high_rate(cfg: ModelConfig, budget: int, target: Target,
                       cap: int = DEFAULT_SEARCH_CAP, keep_rows: bool = False) -> AllocationResult:
    """Exhaustive integer search over allocations with every ``m_i > 2*N2``.

    Minimizes the high-rate bound of ``target``; ties go to the
    lexicographically smallest allocation. ``cfg.m`` is ignored.
    """
    lo = 2 * cfg.N2 + 1
    if budget < lo * cfg.k:
        raise BudgetTooSmall(f"budget {budget} < k*(2*N2+1) = {lo * cfg.k}")
    n = count_compositions(budget, cfg.k, lo)
    if n > cap:
        raise SearchSpaceTooLarge(f"{n} allocations exceed the search cap {cap}")
    f = _objective(cfg, target, "high_rate")
    best, best_val, rows = None, math.inf, [] if keep_rows else None
    for alloc in compositions(budget, cfg.k, lo):
        val = f(alloc)
        if rows is not None:
            rows.append((alloc, val))
        if val < best_val:
            best, best_val = alloc, val
    return AllocationResult(best, best_val, target, "high_rate", enumerated=rows)
