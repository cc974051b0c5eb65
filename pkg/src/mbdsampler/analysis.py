"""Closed-form hitting times and running-time bounds for the samplers.

Everything here is a pure function of weight ratios and the kernel's up
probabilities, so the results are invariant under rescaling the weights.
The two building blocks are the cumulative mass ratios

    S(i) = sum_{m<=i} w(m)/w(i)      (ascent load at i)
    D(i) = sum_{m>i}  w(m)/w(i)      (descent load at i)

evaluated by running recurrences (S(i) = S(i-1)*g(i-1) + 1 and
D(i) = (1 + D(i+1))/g(i)) to keep the total cost linear in N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import TargetDistribution, gamma_ratios
from .kernel import BDKernel

_E = math.e


def _mass_ratio_sums(d: TargetDistribution) -> tuple[np.ndarray, np.ndarray]:
    """S(i) and D(i) for i in 0..N-1."""
    g = gamma_ratios(d)
    n = d.size_n
    ascent = np.empty(n)
    descent = np.empty(n)
    ascent[0] = 1.0
    for i in range(1, n):
        ascent[i] = ascent[i - 1] * g[i - 1] + 1.0
    descent[n - 1] = 1.0 / g[n - 1]
    for i in range(n - 2, -1, -1):
        descent[i] = (1.0 + descent[i + 1]) / g[i]
    return ascent, descent


def _require_chain(d: TargetDistribution, k: BDKernel) -> None:
    if d.size_n != k.size_n:
        raise ValueError("kernel and distribution sizes do not match")
    if d.size_n < 1:
        raise ValueError("hitting times need at least two states")


def expected_up_time(d: TargetDistribution, k: BDKernel) -> float:
    """Expected first-passage time of the chain from state 0 to state N."""
    _require_chain(d, k)
    ascent, _ = _mass_ratio_sums(d)
    return float(np.sum(ascent / k.up[:-1]))


def expected_down_time(d: TargetDistribution, k: BDKernel) -> float:
    """Expected first-passage time of the chain from state N to state 0."""
    _require_chain(d, k)
    _, descent = _mass_ratio_sums(d)
    return float(np.sum(descent / k.up[:-1]))


def theta(d: TargetDistribution, k: BDKernel) -> float:
    """Per-state coalescence constant: E[meeting time] <= theta * N.

    The smaller of the two worst-case per-state loads, max_i S(i)/up[i] and
    max_i D(i)/up[i]; by construction theta*N dominates the smaller of the
    two expected passage times.
    """
    _require_chain(d, k)
    ascent, descent = _mass_ratio_sums(d)
    inv_up = 1.0 / k.up[:-1]
    return float(min(np.max(ascent * inv_up), np.max(descent * inv_up)))


@dataclass(frozen=True)
class TaggedBound:
    """A mean-coalescence-time bound with its provenance tag.

    Tags: "geo" (bounded cumulative mass ratios, linear in N), "longtail"
    (bounded pairwise mass ratios, quadratic in N), "monotone-pi" (monotone
    weights, the longtail form with constant 1).  Constants are computed
    from the data, not certified independent of N.
    """

    tag: str
    constant: float
    value: float


@dataclass(frozen=True)
class SimpleBoundsReport:
    """The data-derived constants and every applicable simple bound."""

    sum_ascent_max: float
    sum_descent_max: float
    ratio_ascent_max: float
    ratio_descent_max: float
    inverse_up_max: float
    geo: TaggedBound
    longtail: TaggedBound
    monotone: TaggedBound | None

    @property
    def best(self) -> TaggedBound:
        candidates = [self.geo, self.longtail]
        if self.monotone is not None:
            candidates.append(self.monotone)
        return min(candidates, key=lambda b: b.value)


def simple_bounds(d: TargetDistribution, k: BDKernel) -> SimpleBoundsReport:
    """Simple mean-coalescence bounds from data-derived constants."""
    _require_chain(d, k)
    n = d.size_n
    ascent, descent = _mass_ratio_sums(d)
    w = d.weights
    # running max of w(m)/w(i) over m <= i, and over m > i
    prefix_max = np.maximum.accumulate(w)[:-1]
    suffix_max = np.maximum.accumulate(w[::-1])[::-1][1:]
    ratio_ascent = prefix_max / w[:-1]
    ratio_descent = suffix_max / w[:-1]

    inv_up_max = float(np.max(1.0 / k.up[:-1]))
    c_geo = float(min(np.max(ascent), np.max(descent)))
    c_long = float(min(np.max(ratio_ascent), np.max(ratio_descent)))
    geo = TaggedBound(tag="geo", constant=c_geo, value=c_geo * inv_up_max * n)
    longtail = TaggedBound(
        tag="longtail",
        constant=c_long,
        value=c_long * inv_up_max * n * (n + 1) / 2.0,
    )
    monotone = None
    diffs = np.diff(w)
    if bool(np.all(diffs <= 0.0) or np.all(diffs >= 0.0)):
        monotone = TaggedBound(
            tag="monotone-pi",
            constant=1.0,
            value=inv_up_max * n * (n + 1) / 2.0,
        )
    return SimpleBoundsReport(
        sum_ascent_max=float(np.max(ascent)),
        sum_descent_max=float(np.max(descent)),
        ratio_ascent_max=float(np.max(ratio_ascent)),
        ratio_descent_max=float(np.max(ratio_descent)),
        inverse_up_max=inv_up_max,
        geo=geo,
        longtail=longtail,
        monotone=monotone,
    )


def beta(b: float) -> float:
    """Per-block non-coalescence probability bound exp(1 - b/e), for b > e."""
    if not b > _E:
        raise ValueError(f"block multiplier {b!r} must exceed e")
    return math.exp(1.0 - b / _E)


@dataclass(frozen=True)
class DoublingBounds:
    """Mean and tail bounds for the doubling sampler's running time."""

    mean: float
    theta: float
    n: int

    def tail(self, k: int) -> float:
        """Bound on P(running time > k * theta * N)."""
        if k < 0:
            raise ValueError("tail index must be nonnegative")
        return math.exp(1.0 - k / (4.0 * _E))


def doubling_bounds(theta_value: float, n: int) -> DoublingBounds:
    """Running-time bounds for doubling CFTP: mean at most 4*theta*N."""
    if not theta_value > 0:
        raise ValueError("theta must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    return DoublingBounds(mean=4.0 * theta_value * n, theta=theta_value, n=n)


@dataclass(frozen=True)
class ReadOnceBounds:
    """Block size and running-time bounds for the read-once sampler."""

    block_size: int
    mean: float
    beta: float

    def tail(self, k: int) -> float:
        """Bound on P(running time > k * block_size)."""
        if k < 1:
            raise ValueError("tail index must be at least 1")
        return (1.0 - self.beta) * self.beta ** (k - 1) * k + self.beta**k


def read_once_bounds(theta_value: float, n: int, b: int = 6) -> ReadOnceBounds:
    """Running-time bounds for read-once CFTP with block size b*ceil(theta)*N."""
    if b != int(b) or int(b) <= 2:
        raise ValueError("block multiplier must be an integer of at least 3")
    if not theta_value > 0:
        raise ValueError("theta must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    b = int(b)
    block = b * math.ceil(theta_value) * n
    block_beta = beta(b)
    return ReadOnceBounds(
        block_size=block,
        mean=2.0 * block / (1.0 - block_beta),
        beta=block_beta,
    )


def block_cost(b: float) -> float:
    """Objective b / (1 - beta(b)) whose integer minimizer sets the block size."""
    return b / (1.0 - beta(b))


def optimal_block_multiplier(lo: int = 3, hi: int = 64) -> int:
    """Integer multiplier minimizing the mean running-time bound (scan)."""
    return min(range(lo, hi + 1), key=block_cost)


@dataclass(frozen=True)
class BoundSet:
    """All analytical quantities for one target/kernel pair."""

    size_n: int
    theta: float
    e_t0n: float
    e_tn0: float
    coalescence_bound: float
    doubling_mean_bound: float
    block_multiplier: int
    block_size: int
    readonce_mean_bound: float
    beta: float
    simple_bound: TaggedBound
    simple_detail: SimpleBoundsReport

    def to_dict(self) -> dict:
        return {
            "n": self.size_n,
            "theta": self.theta,
            "e_t0n": self.e_t0n,
            "e_tn0": self.e_tn0,
            "coalescence_bound": self.coalescence_bound,
            "doubling_mean_bound": self.doubling_mean_bound,
            "block_multiplier": self.block_multiplier,
            "block_size": self.block_size,
            "readonce_mean_bound": self.readonce_mean_bound,
            "beta": self.beta,
            "simple_bound": {
                "tag": self.simple_bound.tag,
                "constant": self.simple_bound.constant,
                "value": self.simple_bound.value,
            },
            "simple_bounds_all": {
                bound.tag: {"constant": bound.constant, "value": bound.value}
                for bound in (
                    self.simple_detail.geo,
                    self.simple_detail.longtail,
                    self.simple_detail.monotone,
                )
                if bound is not None
            },
        }


def bound_set(d: TargetDistribution, k: BDKernel, b: int = 6) -> BoundSet:
    """Aggregate every bound for one target; the CLI's `bounds` payload."""
    th = theta(d, k)
    n = d.size_n
    doubling = doubling_bounds(th, n)
    readonce = read_once_bounds(th, n, b)
    simple = simple_bounds(d, k)
    return BoundSet(
        size_n=n,
        theta=th,
        e_t0n=expected_up_time(d, k),
        e_tn0=expected_down_time(d, k),
        coalescence_bound=th * n,
        doubling_mean_bound=doubling.mean,
        block_multiplier=int(b),
        block_size=readonce.block_size,
        readonce_mean_bound=readonce.mean,
        beta=readonce.beta,
        simple_bound=simple.best,
        simple_detail=simple,
    )
