"""Shared test helpers: synthetic generators and canned batches."""

from __future__ import annotations

import numpy as np
import pytest

from hrcausal.timeseries import TimeSeriesBatch

VAR_CHAIN_EDGES = {("x0", "x1"), ("x1", "x2")}


def make_var_chain(n: int, seed: int, auto: float = 0.5, cross: float = 0.5,
                   noise: float = 1.0) -> TimeSeriesBatch:
    """Linear VAR(1) chain x0 -> x1 -> x2 with autodependencies.

    Cross-coefficients `cross`, unit innovations by default; the companion
    matrix is triangular with spectral radius `auto`, so the process is
    stable.
    """
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((n + 100, 3)) * noise
    x = np.zeros((n + 100, 3))
    for t in range(1, n + 100):
        x[t, 0] = auto * x[t - 1, 0] + eps[t, 0]
        x[t, 1] = auto * x[t - 1, 1] + cross * x[t - 1, 0] + eps[t, 1]
        x[t, 2] = auto * x[t - 1, 2] + cross * x[t - 1, 1] + eps[t, 2]
    return TimeSeriesBatch.from_values(("x0", "x1", "x2"), 10.0, x[100:])


def make_white_noise(n: int, seed: int, n_vars: int = 3) -> TimeSeriesBatch:
    rng = np.random.default_rng(seed)
    names = tuple(f"x{i}" for i in range(n_vars))
    return TimeSeriesBatch.from_values(names, 10.0, rng.standard_normal((n, n_vars)))


@pytest.fixture
def small_batch() -> TimeSeriesBatch:
    """200 rows of seeded noise at 10 Hz, variables (v, d_g, r)."""
    rng = np.random.default_rng(42)
    return TimeSeriesBatch.from_values(
        ("v", "d_g", "r"), 10.0, rng.standard_normal((200, 3))
    )
