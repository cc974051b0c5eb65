"""Target distributions on {0..N} given by strictly positive weights.

Weights are stored exactly as supplied, without normalization: the samplers
only ever consume neighbor ratios w(i)/w(i+1), so any common scale factor is
irrelevant.  Normalization is available separately for verification and for
inverse-transform sampling, under a choice of summation scheme.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np


class SummationMode(Enum):
    """Accumulation scheme for the normalizing constant."""

    NAIVE = "naive"
    PAIRWISE = "pairwise"
    KAHAN = "kahan"


# Recursion base for pairwise summation; blocks this small are folded naively.
_PAIRWISE_BLOCK = 128


@dataclass(frozen=True)
class TargetDistribution:
    """Unnormalized finite target distribution with strictly positive mass."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must all be finite")
        if not np.all(w > 0.0):
            raise ValueError("weights must all be strictly positive")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def size_n(self) -> int:
        """Largest state index N (support is {0..N})."""
        return self.weights.size - 1


def from_weights(weights: Sequence[float] | np.ndarray) -> TargetDistribution:
    """Build a distribution from raw weights, which are stored unmodified."""
    return TargetDistribution(np.asarray(weights, dtype=np.float64))


def geometric(xi: float, n: int) -> TargetDistribution:
    """Truncated geometric target with weight ratio xi on {0..n}.

    Weights are built by cumulative multiplication so consecutive ratios stay
    within a couple of ulps of 1/xi for every index.
    """
    if not 0.0 < xi < 1.0:
        raise ValueError("xi must lie strictly inside (0, 1)")
    if n < 1:
        raise ValueError("n must be at least 1")
    w = np.empty(n + 1)
    w[0] = 1.0
    for i in range(n):
        w[i + 1] = w[i] * xi
    return TargetDistribution(w)


def zipf(alpha: float, n: int) -> TargetDistribution:
    """Zipf target with weights (i+1)**(-alpha) on {0..n}; requires alpha > 1."""
    if not alpha > 1.0:
        raise ValueError("alpha must exceed 1")
    if n < 1:
        raise ValueError("n must be at least 1")
    ranks = np.arange(1, n + 2, dtype=np.float64)
    return TargetDistribution(ranks ** (-alpha))


def gamma_ratio(d: TargetDistribution, i: int) -> float:
    """Neighbor weight ratio w(i)/w(i+1); scale factors cancel exactly."""
    if d.size_n < 1:
        raise IndexError("ratios are undefined for a single-state distribution")
    if not 0 <= i <= d.size_n - 1:
        raise IndexError(f"ratio index {i} outside 0..{d.size_n - 1}")
    return float(d.weights[i] / d.weights[i + 1])


def gamma_ratios(d: TargetDistribution) -> np.ndarray:
    """All neighbor ratios w(i)/w(i+1) for i in 0..N-1.

    Ratios may overflow to inf or underflow to 0 for extreme weight pairs;
    kernel construction rejects those, so no warning is raised here.
    """
    with np.errstate(over="ignore", under="ignore"):
        return d.weights[:-1] / d.weights[1:]


def sum_weights(values: np.ndarray | Sequence[float], mode: SummationMode) -> float:
    """Sum of values under the requested accumulation scheme."""
    v = np.asarray(values, dtype=np.float64)
    if mode is SummationMode.NAIVE:
        total = 0.0
        for x in v:
            total += x
        return total
    if mode is SummationMode.PAIRWISE:
        return _pairwise_sum(v)
    if mode is SummationMode.KAHAN:
        return _kahan_sum(v)
    raise ValueError(f"unknown summation mode {mode!r}")


def _pairwise_sum(v: np.ndarray) -> float:
    if v.size <= _PAIRWISE_BLOCK:
        total = 0.0
        for x in v:
            total += x
        return total
    mid = v.size // 2
    return _pairwise_sum(v[:mid]) + _pairwise_sum(v[mid:])


def _kahan_sum(v: np.ndarray) -> float:
    total = 0.0
    carry = 0.0
    for x in v:
        y = x - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


def normalized_pi(
    d: TargetDistribution, mode: SummationMode = SummationMode.NAIVE
) -> np.ndarray:
    """Normalized probabilities w(i)/C with C summed under ``mode``."""
    total = sum_weights(d.weights, mode)
    return d.weights / total


def load_weights(path: str | Path) -> TargetDistribution:
    """Read weights from a file.

    Accepted formats: a JSON array of numbers, or UTF-8 text with one decimal
    weight per line (line number = state index, ``#`` lines ignored).
    """
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("JSON weight file must contain an array of numbers")
        return from_weights([float(x) for x in data])
    weights = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        try:
            weights.append(float(entry))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: not a decimal weight: {entry!r}") from exc
    if not weights:
        raise ValueError("weight file contains no weights")
    return from_weights(weights)
