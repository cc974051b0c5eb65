"""Monotone birth-and-death transition kernel built from weight ratios.

The kernel is tridiagonal: from state i the chain moves up with probability
up[i], down with probability down[i], and holds otherwise.  The construction
uses only neighbor ratios g(i) = w(i)/w(i+1):

    up[0]   = 1 / (1 + g(0))
    up[i]   = 1 / (1 + max(g(i), g(i-1)))        1 <= i <= N-1,  up[N] = 0
    down[1] = g(0) / (1 + g(0))
    down[i] = g(i-1) / (1 + max(g(i-1), g(i-2)))  2 <= i <= N,   down[0] = 0

which makes the target reversible (w(i)*down[i] = w(i-1)*up[i-1]) and the
kernel monotone (up[i] <= 1 - down[i+1]).  This general form is the single
code path; the specialized formulas valid for monotone ratio sequences are
kept in the test suite as oracles only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distribution import TargetDistribution, gamma_ratios, normalized_pi

# Hold probabilities within this distance below zero are rounding artifacts
# and get clamped; anything worse is a construction error.  4 ulps at 1.0.
_HOLD_CLAMP = 4 * np.finfo(np.float64).eps


class KernelConstructionError(ValueError):
    """Raised when a kernel cannot be built from the given weights."""


@dataclass(frozen=True)
class BDKernel:
    """Tridiagonal transition probabilities of the monotone BD chain."""

    up: np.ndarray
    down: np.ndarray
    hold: np.ndarray
    size_n: int

    def __post_init__(self):
        for name in ("up", "down", "hold"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def build_kernel(d: TargetDistribution) -> BDKernel:
    """Build the monotone BD kernel whose stationary law is ``d`` normalized."""
    n = d.size_n
    if n == 0:
        return BDKernel(
            up=np.zeros(1), down=np.zeros(1), hold=np.ones(1), size_n=0
        )

    g = gamma_ratios(d)
    bad = np.flatnonzero(~np.isfinite(g) | (g <= 0.0))
    if bad.size:
        i = int(bad[0])
        raise KernelConstructionError(
            f"weight ratio w({i})/w({i + 1}) = {g[i]!r} is not a positive finite number"
        )

    up = np.zeros(n + 1)
    down = np.zeros(n + 1)
    up[0] = 1.0 / (1.0 + g[0])
    down[1] = g[0] / (1.0 + g[0])
    if n >= 2:
        pairmax = np.maximum(g[1:], g[:-1])
        up[1:n] = 1.0 / (1.0 + pairmax)
        down[2:] = g[1:] / (1.0 + pairmax)

    # The update function moves up from i when u > 1 - up[i]; monotonicity
    # needs down[j] to stay at or below both 1 - up[j] and 1 - up[j-1].  The
    # inequalities hold in real arithmetic but the stored floats can
    # overshoot by an ulp (exactly so for constant ratio sequences, where
    # up[i] + down[i+1] = 1), so down is clamped into the feasible box; any
    # excess beyond rounding scale is a real defect and rejected.
    headroom = 1.0 - up
    limit = np.minimum(headroom[1:], headroom[:-1])
    excess = down[1:] - limit
    if np.any(excess > _HOLD_CLAMP):
        i = 1 + int(np.flatnonzero(excess > _HOLD_CLAMP)[0])
        raise KernelConstructionError(
            f"down probability at state {i} exceeds monotone headroom by {excess[i - 1]!r}"
        )
    np.minimum(down[1:], limit, out=down[1:])

    hold = (1.0 - up) - down
    low = hold < 0.0
    if np.any(hold < -_HOLD_CLAMP):
        i = int(np.flatnonzero(hold < -_HOLD_CLAMP)[0])
        raise KernelConstructionError(
            f"hold probability at state {i} is {hold[i]!r}, beyond rounding tolerance"
        )
    hold[low] = 0.0

    kernel = BDKernel(up=up, down=down, hold=hold, size_n=n)
    _check_invariants(kernel)
    return kernel


def _check_invariants(k: BDKernel) -> None:
    n = k.size_n
    if np.any(k.up[:n] <= 0.0):
        i = int(np.flatnonzero(k.up[:n] <= 0.0)[0])
        raise KernelConstructionError(f"up probability vanished at state {i}")
    if n >= 1 and np.any(k.down[1:] <= 0.0):
        i = 1 + int(np.flatnonzero(k.down[1:] <= 0.0)[0])
        raise KernelConstructionError(f"down probability vanished at state {i}")
    report = validate_monotone(k)
    if not report.passed:
        raise KernelConstructionError(
            f"monotonicity violated, worst slack {report.min_slack!r}"
        )


@dataclass(frozen=True)
class MonotoneReport:
    """Per-index slack of the monotonicity inequalities.

    slack_next[i] = (1 - down[i+1]) - up[i] and slack_same[i] = (1 - down[i])
    - up[i], both for i in 0..N-1.  The kernel is monotone iff every slack is
    nonnegative; slacks are reported rather than a bare boolean so that
    near-degenerate targets remain diagnosable.
    """

    slack_next: np.ndarray
    slack_same: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.slack_next >= 0.0) and np.all(self.slack_same >= 0.0))

    @property
    def min_slack(self) -> float:
        if self.slack_next.size == 0:
            return float("inf")
        return float(min(self.slack_next.min(), self.slack_same.min()))


def validate_monotone(k: BDKernel) -> MonotoneReport:
    """Check the monotone-coupling inequalities; vacuous for a 1x1 kernel.

    Slacks are evaluated as (1 - up[i]) - down[j], i.e. against the exact
    threshold the update function compares uniforms with, so the sign of a
    slack decides the inequality without further rounding doubt.
    """
    n = k.size_n
    if n == 0:
        return MonotoneReport(slack_next=np.empty(0), slack_same=np.empty(0))
    headroom = 1.0 - k.up[:n]
    slack_next = headroom - k.down[1:]
    slack_same = headroom - k.down[:n]
    return MonotoneReport(slack_next=slack_next, slack_same=slack_same)


@dataclass(frozen=True)
class StationaryCheck:
    """Residuals of the stationarity of the target under the kernel."""

    detailed_balance: float
    fixed_point: float | None


def dense_matrix(k: BDKernel) -> np.ndarray:
    """Dense (N+1)x(N+1) transition matrix; intended for small N only."""
    n = k.size_n
    mat = np.zeros((n + 1, n + 1))
    idx = np.arange(n + 1)
    mat[idx, idx] = k.hold
    mat[idx[:-1], idx[:-1] + 1] = k.up[:-1]
    mat[idx[1:], idx[1:] - 1] = k.down[1:]
    return mat


def stationary_residual(
    k: BDKernel, d: TargetDistribution, dense_limit: int = 2000
) -> StationaryCheck:
    """Worst relative detailed-balance error, plus the full fixed-point
    residual ||pi P - pi||_inf when N is small enough to form P densely."""
    if k.size_n != d.size_n:
        raise ValueError("kernel and distribution sizes do not match")
    n = k.size_n
    if n == 0:
        return StationaryCheck(detailed_balance=0.0, fixed_point=0.0)
    w = d.weights
    flow_down = w[1:] * k.down[1:]
    flow_up = w[:-1] * k.up[:-1]
    balance = float(np.max(np.abs(flow_down - flow_up) / flow_down))
    fixed_point = None
    if n <= dense_limit:
        pi = normalized_pi(d)
        fixed_point = float(np.max(np.abs(pi @ dense_matrix(k) - pi)))
    return StationaryCheck(detailed_balance=balance, fixed_point=fixed_point)


class GammaTrend(Enum):
    """Shape of the neighbor-ratio sequence."""

    NONDECREASING = "nondecreasing"
    NONINCREASING = "nonincreasing"
    BOTH = "both"
    NEITHER = "neither"


def gamma_monotonicity(d: TargetDistribution, rel_tol: float = 1e-12) -> GammaTrend:
    """Classify the ratio sequence; "both" means constant.

    Comparisons allow a relative slack of ``rel_tol`` so that ratio sequences
    that are constant up to rounding (e.g. geometric weights) classify as
    constant.
    """
    if d.size_n < 1:
        raise ValueError("classification needs at least two states")
    g = gamma_ratios(d)
    slack = rel_tol * np.minimum(np.abs(g[:-1]), np.abs(g[1:]))
    nondecreasing = bool(np.all(g[1:] >= g[:-1] - slack))
    nonincreasing = bool(np.all(g[1:] <= g[:-1] + slack))
    if nondecreasing and nonincreasing:
        return GammaTrend.BOTH
    if nondecreasing:
        return GammaTrend.NONDECREASING
    if nonincreasing:
        return GammaTrend.NONINCREASING
    return GammaTrend.NEITHER


def kernel_dump(k: BDKernel) -> dict:
    """JSON-ready dump of the kernel used by the CLI."""
    report = validate_monotone(k)
    return {
        "n": k.size_n,
        "p": k.up.tolist(),
        "q": k.down.tolist(),
        "r": k.hold.tolist(),
        "monotone_slack_min": report.min_slack,
    }
