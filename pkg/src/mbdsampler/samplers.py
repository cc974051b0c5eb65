"""Perfect samplers over the monotone BD kernel, plus the inverse-transform
baseline.

Two exact samplers are provided.  The doubling sampler looks further and
further into the past, doubling the horizon t until the envelope coalesces
over the freshly revealed half-window [-t, -t/2), then replays the stored
uniforms of [-t/2, 0); it needs O(t) memory for the stored past.  The
read-once sampler scans the stream forward in fixed-size blocks, consuming
every uniform exactly once in O(1) memory, which is what lets it sample
from unnormalized targets indefinitely.

Each sampler has a pure single-sample form and a compiled batch form driven
by the same stream; given the same seed, the batch reproduces the sequential
samples exactly (covered by tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .distribution import SummationMode, TargetDistribution, normalized_pi
from .kernel import BDKernel
from .rng import PastBuffer, UniformStream
from .update import phi

# Block multiplier minimizing the read-once mean running-time bound.
OPTIMAL_BLOCK_MULTIPLIER = 6

DEFAULT_MAX_HORIZON = 2**40
DEFAULT_MAX_BLOCKS = 2**32


class SamplingCapExceeded(RuntimeError):
    """An iteration cap was hit; in theory this only happens for a corrupted
    kernel, so it is surfaced as a hard error rather than a value."""


@dataclass(frozen=True)
class SampleResult:
    """One drawn sample with its randomness accounting.

    ``uniforms_used`` is the running time: the doubling horizon, the total
    block length for read-once, 1 for inverse transform.  ``blocks`` is the
    (search, confirm) block-count pair for read-once, None otherwise.
    """

    value: int
    uniforms_used: int
    blocks: tuple[int, int] | None = None


@dataclass(frozen=True)
class BatchResult:
    """Vectorized sampler output: per-sample values and running times."""

    values: np.ndarray
    uniforms_used: np.ndarray
    blocks_first: np.ndarray | None = None
    blocks_second: np.ndarray | None = None


def doubling_sample(
    k: BDKernel, past: PastBuffer, max_horizon: int = DEFAULT_MAX_HORIZON
) -> SampleResult:
    """Draw one exact sample by doubling CFTP over the given past buffer.

    The horizon starts at 2.  At horizon t the envelope is run from (0, N)
    over the uniforms at indices -t..-t/2-1 (all newly revealed); if it
    coalesces, the single surviving chain is replayed through the previously
    revealed indices -t/2..-1 and the time-0 state is returned.
    """
    n = k.size_n
    if n == 0:
        return SampleResult(value=0, uniforms_used=0)
    t = 2
    while t <= max_horizon:
        lo, hi = 0, n
        for m in range(-t, -(t // 2)):
            u = past.get(m)
            lo = phi(k, lo, u)
            hi = phi(k, hi, u)
        if lo == hi:
            y = lo
            for m in range(-(t // 2), 0):
                y = phi(k, y, past.get(m))
            return SampleResult(value=y, uniforms_used=t)
        t *= 2
    raise SamplingCapExceeded(f"no coalescence within horizon cap {max_horizon}")


def read_once_sample(
    k: BDKernel,
    block_size: int,
    stream: UniformStream,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
) -> SampleResult:
    """Draw one exact sample by read-once CFTP on a forward stream.

    Blocks of ``block_size`` uniforms are consumed one at a time, each
    exactly once.  Search phase: advance until a block maps 0 and N to the
    same state, the candidate.  Confirm phase: a non-coalescing block
    replaces the candidate by its image through the block; a coalescing
    block ends the sample, returning the pre-block candidate.  Repeated
    calls on the same stream are valid and independent.
    """
    if block_size < 1:
        raise ValueError("block size must be at least 1")
    n = k.size_n
    if n == 0:
        return SampleResult(value=0, uniforms_used=0, blocks=(0, 0))

    def run_block(lo: int, hi: int, y: int | None):
        for _ in range(block_size):
            u = stream.next()
            lo = phi(k, lo, u)
            hi = phi(k, hi, u)
            if y is not None:
                y = phi(k, y, u)
        return lo, hi, y

    blocks_first = 0
    while True:
        blocks_first += 1
        if blocks_first > max_blocks:
            raise SamplingCapExceeded(f"search phase exceeded {max_blocks} blocks")
        lo, hi, _ = run_block(0, n, None)
        if lo == hi:
            x = lo
            break

    blocks_second = 0
    while True:
        blocks_second += 1
        if blocks_first + blocks_second > max_blocks:
            raise SamplingCapExceeded(f"confirm phase exceeded {max_blocks} blocks")
        lo, hi, y = run_block(0, n, x)
        if lo == hi:
            return SampleResult(
                value=x,
                uniforms_used=(blocks_first + blocks_second) * block_size,
                blocks=(blocks_first, blocks_second),
            )
        x = y


def default_block_size(theta: float, n: int) -> int:
    """Block size 6 * ceil(theta) * n prescribed by the running-time analysis."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    return OPTIMAL_BLOCK_MULTIPLIER * math.ceil(theta) * n


def doubling_sample_many(
    k: BDKernel,
    count: int,
    stream: UniformStream,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    initial_scratch: int = 1 << 16,
) -> BatchResult:
    """Batch form of ``doubling_sample``; sample i consumes the stretch of the
    stream a sequential run with per-sample fresh PastBuffers would.

    The scratch buffer doubles and the whole batch deterministically reruns
    from the saved stream state if any sample's horizon outgrows it.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    n = k.size_n
    if n == 0 or count == 0:
        return BatchResult(
            values=np.zeros(count, dtype=np.int64),
            uniforms_used=np.zeros(count, dtype=np.int64),
        )
    values = np.empty(count, dtype=np.int64)
    horizons = np.empty(count, dtype=np.int64)
    scratch_len = max(2, initial_scratch)
    state = stream.state_words()
    while True:
        scratch = np.empty(scratch_len)
        consumed, flag = _engine._doubling_runs(
            np.uint64(state[0]),
            np.uint64(state[1]),
            np.uint64(state[2]),
            np.uint64(state[3]),
            k.up,
            k.down,
            count,
            max_horizon,
            scratch,
            values,
            horizons,
        )
        if flag == _engine.FLAG_GROW:
            scratch_len *= 2
            continue
        if flag == _engine.FLAG_CAP:
            raise SamplingCapExceeded(f"no coalescence within horizon cap {max_horizon}")
        stream.skip(consumed)
        return BatchResult(values=values, uniforms_used=horizons)


def read_once_sample_many(
    k: BDKernel,
    block_size: int,
    count: int,
    stream: UniformStream,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
) -> BatchResult:
    """Batch form of ``read_once_sample`` on a single forward stream."""
    if block_size < 1:
        raise ValueError("block size must be at least 1")
    if count < 0:
        raise ValueError("count must be nonnegative")
    n = k.size_n
    zeros = np.zeros(count, dtype=np.int64)
    if n == 0 or count == 0:
        return BatchResult(
            values=zeros.copy(),
            uniforms_used=zeros.copy(),
            blocks_first=zeros.copy(),
            blocks_second=zeros.copy(),
        )
    values = np.empty(count, dtype=np.int64)
    firsts = np.empty(count, dtype=np.int64)
    seconds = np.empty(count, dtype=np.int64)
    state = stream.state_words()
    consumed, flag = _engine._read_once_runs(
        np.uint64(state[0]),
        np.uint64(state[1]),
        np.uint64(state[2]),
        np.uint64(state[3]),
        k.up,
        k.down,
        block_size,
        count,
        max_blocks,
        values,
        firsts,
        seconds,
    )
    if flag == _engine.FLAG_CAP:
        raise SamplingCapExceeded(f"block cap {max_blocks} exceeded")
    stream.skip(consumed)
    return BatchResult(
        values=values,
        uniforms_used=(firsts + seconds) * block_size,
        blocks_first=firsts,
        blocks_second=seconds,
    )


class CumulativeTable:
    """Precomputed cumulative distribution for inverse-transform sampling."""

    def __init__(self, d: TargetDistribution, mode: SummationMode = SummationMode.NAIVE):
        pi = normalized_pi(d, mode)
        self.sigma = np.cumsum(pi)
        self.size_n = d.size_n

    def lookup(self, u: float) -> int:
        """Smallest state whose cumulative mass reaches ``u``."""
        if not 0 < u < 1:
            raise ValueError(f"uniform {u!r} outside the open interval (0, 1)")
        idx = int(np.searchsorted(self.sigma, u, side="left"))
        return min(idx, self.size_n)

    def lookup_many(self, us: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.sigma, us, side="left")
        return np.minimum(idx, self.size_n).astype(np.int64)


def inverse_transform_sample(
    d: TargetDistribution, u: float, mode: SummationMode = SummationMode.NAIVE
) -> int:
    """Single inverse-transform draw; builds the cumulative table on the fly.

    For repeated draws build a CumulativeTable once, or use
    ``inverse_transform_sample_many``.
    """
    return CumulativeTable(d, mode).lookup(u)


def inverse_transform_sample_many(
    d: TargetDistribution,
    count: int,
    stream: UniformStream,
    mode: SummationMode = SummationMode.NAIVE,
) -> BatchResult:
    """Vectorized inverse-transform sampling; one uniform per sample."""
    table = CumulativeTable(d, mode)
    values = table.lookup_many(stream.take(count))
    return BatchResult(values=values, uniforms_used=np.ones(count, dtype=np.int64))
