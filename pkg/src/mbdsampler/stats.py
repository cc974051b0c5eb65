"""Statistical verification of sampler output against exact targets.

Exactness is measured two ways: total-variation distance between the
empirical histogram and the normalized target, and a Pearson chi-square
goodness-of-fit test (adjacent bins are pooled left to right until every
group's expected count reaches 5).  Running times are compared against the
analytical bounds with a three-standard-error allowance so that Monte Carlo
noise cannot fail a true bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc

from .analysis import BoundSet

_MIN_EXPECTED = 5.0


def total_variation(hist: np.ndarray, pi: np.ndarray) -> float:
    """Half the L1 distance between the empirical and exact distributions."""
    hist = np.asarray(hist, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    if hist.shape != pi.shape:
        raise ValueError("histogram and target have different supports")
    total = hist.sum()
    if total <= 0:
        raise ValueError("histogram is empty")
    return float(0.5 * np.sum(np.abs(hist / total - pi)))


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "dof": self.dof, "p_value": self.p_value}


def chi_square_test(hist: np.ndarray, pi: np.ndarray, n: int | None = None) -> ChiSquareResult:
    """Pearson goodness-of-fit test of counts against exact probabilities."""
    hist = np.asarray(hist, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    if hist.shape != pi.shape:
        raise ValueError("histogram and target have different supports")
    if n is None:
        n = int(hist.sum())
    expected = n * pi

    # merge low-expectation bins left to right; the tail folds into the last group
    observed_groups: list[float] = []
    expected_groups: list[float] = []
    acc_obs = 0.0
    acc_exp = 0.0
    for obs, exp in zip(hist, expected):
        acc_obs += obs
        acc_exp += exp
        if acc_exp >= _MIN_EXPECTED:
            observed_groups.append(acc_obs)
            expected_groups.append(acc_exp)
            acc_obs = 0.0
            acc_exp = 0.0
    if acc_exp > 0.0:
        if observed_groups:
            observed_groups[-1] += acc_obs
            expected_groups[-1] += acc_exp
        else:
            observed_groups.append(acc_obs)
            expected_groups.append(acc_exp)
    if len(observed_groups) < 2:
        raise ValueError("fewer than two bins with usable expected counts")

    obs = np.array(observed_groups)
    exp = np.array(expected_groups)
    statistic = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(observed_groups) - 1
    p_value = float(gammaincc(dof / 2.0, statistic / 2.0))
    return ChiSquareResult(statistic=statistic, dof=dof, p_value=p_value)


@dataclass(frozen=True)
class BoundCheck:
    """One empirical-versus-analytical comparison with its noise allowance."""

    name: str
    empirical: float
    bound: float
    allowance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "empirical": self.empirical,
            "bound": self.bound,
            "allowance": self.allowance,
            "pass": self.passed,
        }


def _mean_check(name: str, times: np.ndarray, bound: float) -> BoundCheck:
    mean = float(times.mean())
    se = float(times.std(ddof=1) / math.sqrt(times.size)) if times.size > 1 else 0.0
    return BoundCheck(
        name=name,
        empirical=mean,
        bound=bound,
        allowance=3.0 * se,
        passed=mean <= bound + 3.0 * se,
    )


def _tail_check(name: str, exceed_fraction: float, runs: int, bound: float) -> BoundCheck:
    se = math.sqrt(max(exceed_fraction * (1.0 - exceed_fraction), 0.0) / runs)
    return BoundCheck(
        name=name,
        empirical=exceed_fraction,
        bound=bound,
        allowance=3.0 * se,
        passed=exceed_fraction <= bound + 3.0 * se,
    )


def summarize_times(
    times: np.ndarray,
    bounds: BoundSet,
    kind: str,
    blocks_first: np.ndarray | None = None,
    blocks_second: np.ndarray | None = None,
    tail_multipliers: tuple[int, ...] = (16, 32, 44),
) -> list[BoundCheck]:
    """Bound checks appropriate for one family of observed running times.

    ``kind`` is one of "coalescence", "doubling", "readonce", "itm"; the
    read-once checks use the per-sample block counts when provided.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise ValueError("no observed times")
    checks: list[BoundCheck] = []

    if kind == "coalescence":
        checks.append(_mean_check("coalescence_mean", times, bounds.coalescence_bound))
        detail = bounds.simple_detail
        for tagged in (detail.geo, detail.longtail, detail.monotone):
            if tagged is not None:
                checks.append(
                    _mean_check(f"coalescence_mean_vs_{tagged.tag}", times, tagged.value)
                )
    elif kind == "doubling":
        checks.append(_mean_check("doubling_mean", times, bounds.doubling_mean_bound))
        n = bounds.size_n
        for k_mul in tail_multipliers:
            exceed = float(np.mean(times > k_mul * bounds.theta * n))
            checks.append(
                _tail_check(
                    f"doubling_tail_k{k_mul}",
                    exceed,
                    times.size,
                    math.exp(1.0 - k_mul / (4.0 * math.e)),
                )
            )
    elif kind == "readonce":
        checks.append(_mean_check("readonce_mean", times, bounds.readonce_mean_bound))
        remainders = np.mod(times.astype(np.int64), bounds.block_size)
        frac_offgrid = float(np.mean(remainders != 0))
        checks.append(
            BoundCheck(
                name="readonce_block_multiple",
                empirical=frac_offgrid,
                bound=0.0,
                allowance=0.0,
                passed=frac_offgrid == 0.0,
            )
        )
        if blocks_first is not None and blocks_second is not None:
            total_blocks = float(np.sum(blocks_first) + np.sum(blocks_second))
            uncoalesced = float(
                np.sum(blocks_first - 1) + np.sum(blocks_second - 1)
            )
            frac = uncoalesced / total_blocks
            checks.append(
                _tail_check(
                    "readonce_block_noncoalescence",
                    frac,
                    int(total_blocks),
                    bounds.beta,
                )
            )
    elif kind == "itm":
        pass
    else:
        raise ValueError(f"unknown time kind {kind!r}")
    return checks


@dataclass(frozen=True)
class TimeStats:
    mean: float
    sd: float
    q50: float
    q90: float
    q99: float
    max: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "sd": self.sd,
            "q50": self.q50,
            "q90": self.q90,
            "q99": self.q99,
            "max": self.max,
        }


def time_stats(times: np.ndarray) -> TimeStats:
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise ValueError("no observed times")
    q50, q90, q99 = np.quantile(times, [0.5, 0.9, 0.99])
    return TimeStats(
        mean=float(times.mean()),
        sd=float(times.std(ddof=1)) if times.size > 1 else 0.0,
        q50=float(q50),
        q90=float(q90),
        q99=float(q99),
        max=float(times.max()),
    )


@dataclass(frozen=True)
class RunReport:
    """Everything one experiment produced, serializable as stable JSON."""

    config: dict
    histogram: np.ndarray
    tv_distance: float
    chi_square: ChiSquareResult
    time_stats: TimeStats
    bounds: BoundSet | None
    bound_checks: list[BoundCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        significance = self.config.get("significance", 1e-4)
        stat_ok = self.chi_square.p_value >= significance
        tv_threshold = self.config.get("tv_threshold")
        if tv_threshold is not None:
            stat_ok = stat_ok and self.tv_distance <= tv_threshold
        return stat_ok and all(check.passed for check in self.bound_checks)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "histogram": self.histogram.tolist(),
            "tv_distance": self.tv_distance,
            "chi_square": self.chi_square.to_dict(),
            "time_stats": self.time_stats.to_dict(),
            "bounds": self.bounds.to_dict() if self.bounds is not None else None,
            "bound_checks": [check.to_dict() for check in self.bound_checks],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def make_run_report(
    config: dict,
    values: np.ndarray,
    uniforms_used: np.ndarray,
    pi: np.ndarray,
    bounds: BoundSet | None,
    kind: str,
    blocks_first: np.ndarray | None = None,
    blocks_second: np.ndarray | None = None,
) -> RunReport:
    """Aggregate one experiment's samples into a report."""
    values = np.asarray(values)
    histogram = np.bincount(values, minlength=pi.size)
    if histogram.size != pi.size:
        raise ValueError("sample values outside the target support")
    checks: list[BoundCheck] = []
    if bounds is not None and kind != "itm":
        checks = summarize_times(
            uniforms_used, bounds, kind, blocks_first=blocks_first, blocks_second=blocks_second
        )
    return RunReport(
        config=config,
        histogram=histogram,
        tv_distance=total_variation(histogram, pi),
        chi_square=chi_square_test(histogram, pi),
        time_stats=time_stats(uniforms_used),
        bounds=bounds,
        bound_checks=checks,
    )
