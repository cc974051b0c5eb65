"""Shared fixtures and independent oracle helpers.

Oracles here deliberately re-derive quantities by the most literal route
available (dense matrices, double loops, direct formula evaluation) so they
share no code with the implementation paths they check.
"""

from __future__ import annotations

import numpy as np
import pytest

from mbdsampler import build_kernel, from_weights


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: spec acceptance criteria")


@pytest.fixture
def uniform3():
    """Uniform target on {0,1,2}; its kernel is the standard hand example."""
    return from_weights([1.0, 1.0, 1.0])


@pytest.fixture
def uniform3_kernel(uniform3):
    return build_kernel(uniform3)


def dense_kernel_oracle(weights: np.ndarray) -> np.ndarray:
    """Dense transition matrix built directly from the defining formulas,
    independent of the kernel module's vectorized construction."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.size - 1
    g = [w[i] / w[i + 1] for i in range(n)]
    mat = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        if i == 0:
            p = 1.0 / (1.0 + g[0])
        elif i < n:
            p = 1.0 / (1.0 + max(g[i], g[i - 1]))
        else:
            p = 0.0
        if i == 0:
            q = 0.0
        elif i == 1:
            q = g[0] / (1.0 + g[0])
        else:
            q = g[i - 1] / (1.0 + max(g[i - 1], g[i - 2]))
        if i < n:
            mat[i, i + 1] = p
        if i > 0:
            mat[i, i - 1] = q
        mat[i, i] = 1.0 - p - q
    return mat


def corollary_nondecreasing_oracle(weights: np.ndarray):
    """Specialized kernel formulas valid when the ratio sequence never
    decreases: up = 1/(1+g(i)), down = g(i-1)/(1+g(i-1))."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.size - 1
    g = w[:-1] / w[1:]
    up = np.zeros(n + 1)
    down = np.zeros(n + 1)
    up[:n] = 1.0 / (1.0 + g)
    down[1:] = g / (1.0 + g)
    return up, down


def corollary_nonincreasing_oracle(weights: np.ndarray):
    """Specialized kernel formulas valid when the ratio sequence never
    increases: up[0] = 1/(1+g(0)), up[i] = 1/(1+g(i-1)),
    down[1] = g(0)/(1+g(0)), down[i] = g(i-1)/(1+g(i-2))."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.size - 1
    g = w[:-1] / w[1:]
    up = np.zeros(n + 1)
    down = np.zeros(n + 1)
    up[0] = 1.0 / (1.0 + g[0])
    for i in range(1, n):
        up[i] = 1.0 / (1.0 + g[i - 1])
    down[1] = g[0] / (1.0 + g[0])
    for i in range(2, n + 1):
        down[i] = g[i - 1] / (1.0 + g[i - 2])
    return up, down


def hitting_time_brute_force(weights: np.ndarray, up: np.ndarray) -> tuple[float, float]:
    """Expected passage times 0->N and N->0 via the literal double sums."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.size - 1
    e_up = 0.0
    e_down = 0.0
    for i in range(n):
        e_up += sum(w[m] / w[i] for m in range(i + 1)) / up[i]
        e_down += sum(w[m] / w[i] for m in range(i + 1, n + 1)) / up[i]
    return e_up, e_down


def theta_brute_force(weights: np.ndarray, up: np.ndarray) -> float:
    """Per-state constant via the literal double sums."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.size - 1
    first = max(
        sum(w[m] / w[i] for m in range(i + 1)) / up[i] for i in range(n)
    )
    second = max(
        sum(w[m] / w[i] for m in range(i + 1, n + 1)) / up[i] for i in range(n)
    )
    return min(first, second)


def random_positive_weights(rng: np.random.Generator, n: int, spread: float = 1.0):
    """Strictly positive weights with log-uniform spread."""
    return np.exp(rng.uniform(-spread, spread, size=n + 1))
