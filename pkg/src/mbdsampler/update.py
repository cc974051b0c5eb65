"""Monotone update function and the envelope coupling it drives.

A single uniform u moves state i up when u > 1 - up[i], down when u < down[i]
and holds otherwise (ties land on hold).  Because the kernel satisfies
up[i] <= 1 - down[i+1], the update preserves the state order pathwise, so the
extreme copies started from 0 and N bracket every other copy; only those two
are ever simulated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .kernel import BDKernel
from .rng import UniformStream


@dataclass(frozen=True)
class Envelope:
    """Bracketing pair of chain states, lower never above upper."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"envelope out of order: lo={self.lo} > hi={self.hi}")

    @property
    def coalesced(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class CoalescenceResult:
    """Meeting time of the extreme copies and the state they met in."""

    steps: int
    state: int


@dataclass(frozen=True)
class TimedOut:
    """Envelope still open after the allowed number of steps (not an error)."""

    steps: int


def phi(k: BDKernel, i: int, u: float) -> int:
    """One monotone update step from state i driven by uniform u."""
    if not 0 < u < 1:
        raise ValueError(f"uniform {u!r} outside the open interval (0, 1)")
    if not 0 <= i <= k.size_n:
        raise ValueError(f"state {i} outside 0..{k.size_n}")
    if u > 1.0 - k.up[i]:
        return i + 1
    if u < k.down[i]:
        return i - 1
    return i


def step_envelope(k: BDKernel, e: Envelope, u: float) -> Envelope:
    """Advance both envelope components with the same uniform."""
    return Envelope(lo=phi(k, e.lo, u), hi=phi(k, e.hi, u))


def simulate_coalescence(
    k: BDKernel, stream: UniformStream, max_steps: int
) -> CoalescenceResult | TimedOut:
    """Run the envelope forward from (0, N) until the copies meet.

    Returns the first meeting time and state, or TimedOut after ``max_steps``
    uniforms (the stream is still advanced by all of them).
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if k.size_n == 0:
        return CoalescenceResult(steps=0, state=0)
    e = Envelope(lo=0, hi=k.size_n)
    for step in range(1, max_steps + 1):
        e = step_envelope(k, e, stream.next())
        if e.coalesced:
            return CoalescenceResult(steps=step, state=e.lo)
    return TimedOut(steps=max_steps)


def simulate_coalescence_many(
    k: BDKernel, count: int, stream: UniformStream, max_steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Batch form of ``simulate_coalescence`` on one stream.

    Returns (steps, states); a timed-out run has steps -1 and consumed
    ``max_steps`` uniforms.  Matches repeated single runs on the same stream.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if count < 0:
        raise ValueError("count must be nonnegative")
    if k.size_n == 0 or count == 0:
        return np.zeros(count, dtype=np.int64), np.zeros(count, dtype=np.int64)
    steps = np.empty(count, dtype=np.int64)
    states = np.empty(count, dtype=np.int64)
    w = stream.state_words()
    consumed, _ = _engine._envelope_runs(
        np.uint64(w[0]),
        np.uint64(w[1]),
        np.uint64(w[2]),
        np.uint64(w[3]),
        k.up,
        k.down,
        count,
        max_steps,
        steps,
        states,
    )
    stream.skip(consumed)
    return steps, states
