"""Reproducible uniform random streams on the open interval (0, 1).

The underlying generator is NumPy's PCG64 bit generator (O'Neill's permuted
congruential generator, XSL-RR 128/64 variant), a fixed, named algorithm with
identical output on every platform.  Each draw consumes exactly one 64-bit
word, so a stream is fully determined by ``(seed, stream_index)`` and the
number of draws emitted so far.

Draws are mapped to the open interval as ``u = (k + 0.5) * 2**-52`` where
``k`` is the top 52 bits of the word.  ``k + 0.5`` is exactly representable,
so ``u`` lies in ``[2**-53, 1 - 2**-53]`` and can never collapse to 0.0 or
round up to 1.0.
"""

from __future__ import annotations

import numpy as np

_TWO52 = 2.0**52
_OPEN_SCALE = 2.0**-52


def _open_unit(x: np.ndarray) -> np.ndarray:
    """Map [0,1) doubles (53-bit grid) onto the open-interval 52-bit grid in place."""
    np.multiply(x, _TWO52, out=x)
    np.floor(x, out=x)
    x += 0.5
    x *= _OPEN_SCALE
    return x


class UniformStream:
    """Seeded stream of i.i.d. uniforms strictly inside (0, 1).

    ``stream_index`` selects an independent substream of the same seed (used
    for parallel workers); index 0 is the root stream.
    """

    def __init__(self, seed: int, stream_index: int = 0):
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        if self.stream_index == 0:
            ss = np.random.SeedSequence(self.seed)
        else:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        self._bit_generator = np.random.PCG64(ss)
        self._gen = np.random.Generator(self._bit_generator)
        self.position = 0

    def take(self, count: int) -> np.ndarray:
        """Return the next ``count`` uniforms as an array, advancing the stream."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        u = self._gen.random(count)
        self.position += count
        return _open_unit(u)

    def next(self) -> float:
        """Return the next uniform."""
        return float(self.take(1)[0])

    def skip(self, count: int) -> None:
        """Advance the stream by ``count`` draws without materializing them."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        self._bit_generator.advance(count)
        self.position += count

    def state_words(self) -> tuple[int, int, int, int]:
        """Current PCG64 state as (state_hi, state_lo, inc_hi, inc_lo) words."""
        st = self._bit_generator.state["state"]
        mask = (1 << 64) - 1
        return (
            st["state"] >> 64,
            st["state"] & mask,
            st["inc"] >> 64,
            st["inc"] & mask,
        )


class PastBuffer:
    """Lazily materialized uniforms at negative time indices -1, -2, ...

    Index ``m`` (< 0) maps to the ``(-m)``-th draw of the backing stream, so
    extending the buffer further into the past never changes existing
    entries, and repeated reads are idempotent.  Memory grows linearly with
    the deepest index generated.
    """

    def __init__(self, stream: UniformStream):
        self.stream = stream
        self._values: list[float] = []

    def get(self, m: int) -> float:
        """Uniform at negative time index ``m``."""
        if m >= 0:
            raise ValueError("past index must be negative")
        need = -m - len(self._values)
        if need > 0:
            self._values.extend(self.stream.take(need).tolist())
        return self._values[-m - 1]

    @property
    def generated(self) -> int:
        """Number of past values materialized so far."""
        return len(self._values)


def worker_stream(seed: int, worker_index: int) -> UniformStream:
    """Derived stream for parallel worker ``worker_index`` of a root seed."""
    return UniformStream(seed, stream_index=worker_index)
