import numpy as np
import pytest

from indirect_sampling import ModelConfig, SamplingPlan

FIG1 = dict(T=1.0, N1=5, N2=19, k=3, eta=0.1)


@pytest.fixture
def fig1():
    """Reference sweep parameters: k=3, N1=5, N2=19 (N=15), sigma^2=1, eta=0.1."""
    return lambda m: ModelConfig(sigma2=[1.0] * 3, m=[m] * 3, **FIG1)


def random_config(rng, max_k=4, max_m=12, N_max=8, low_rate=False):
    k = int(rng.integers(1, max_k + 1))
    N1 = int(rng.integers(1, 6))
    N = int(rng.integers(1, N_max + 1))
    if low_rate:
        total = int(rng.integers(0, N + 1))
        m = np.bincount(rng.integers(0, k, size=total), minlength=k)
    else:
        m = rng.integers(0, max_m + 1, size=k)
    return ModelConfig(
        T=float(rng.uniform(0.5, 3.0)),
        N1=N1,
        N2=N1 + N - 1,
        k=k,
        eta=float(10 ** rng.uniform(-1.5, 1)),
        sigma2=(10 ** rng.uniform(-1, 1.5, size=k)).tolist(),
        m=m.tolist(),
    )


def random_times(rng, cfg):
    return SamplingPlan(times=[rng.uniform(0, cfg.T, size=mi).tolist() for mi in cfg.m])


@pytest.fixture
def rng():
    return np.random.default_rng(20161207)
