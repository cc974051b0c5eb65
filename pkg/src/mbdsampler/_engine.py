"""Compiled batch drivers with an inline PCG64 generator.

The hot loops (envelope runs, the two CFTP samplers, first-passage
simulation) generate their uniforms in-register from the same PCG64 stream a
``UniformStream`` wraps: the state words are taken from the stream before a
batch and the stream is advanced afterwards by the number of draws consumed,
so batch runs and the pure-Python single-sample paths read identical values
at identical positions.  Bit-compatibility of the port (step, double output,
and jump-ahead) against NumPy's PCG64 is enforced by the test suite.

Each driver precomputes the up-move thresholds 1 - up[i] once; the stored
doubles equal the values the pure update function computes per step, so the
decisions are bit-identical.

Drivers return a ``flag`` word: 0 ok, 1 iteration cap exceeded, 2 scratch
buffer too small (caller enlarges and reruns from the saved state).
"""

from __future__ import annotations

from numba import njit, uint64

# PCG64 128-bit LCG multiplier (pcg_variants.h, PCG_DEFAULT_MULTIPLIER_128).
_PCG_MUL_HI = uint64(0x2360ED051FC65DA4)
_PCG_MUL_LO = uint64(0x4385DF649FCCF645)

_HALF_STEP = 2.0**-53  # offset of the open-interval grid
_OPEN_SCALE = 2.0**-52

FLAG_OK = 0
FLAG_CAP = 1
FLAG_GROW = 2


@njit(cache=True, nogil=True, inline="always")
def _mulhi64(a, b):
    a_lo = a & uint64(0xFFFFFFFF)
    a_hi = a >> uint64(32)
    b_lo = b & uint64(0xFFFFFFFF)
    b_hi = b >> uint64(32)
    t = a_lo * b_lo
    k = t >> uint64(32)
    t = a_hi * b_lo + k
    w1 = t & uint64(0xFFFFFFFF)
    w2 = t >> uint64(32)
    t = a_lo * b_hi + w1
    k = t >> uint64(32)
    return a_hi * b_hi + w2 + k


@njit(cache=True, nogil=True, inline="always")
def _mul128(ahi, alo, bhi, blo):
    lo = alo * blo
    hi = _mulhi64(alo, blo) + alo * bhi + ahi * blo
    return hi, lo


@njit(cache=True, nogil=True, inline="always")
def _add128(ahi, alo, bhi, blo):
    lo = alo + blo
    carry = uint64(1) if lo < alo else uint64(0)
    return ahi + bhi + carry, lo


@njit(cache=True, nogil=True, inline="always")
def _pcg_next(shi, slo, ihi, ilo):
    """Advance the LCG one step and emit the XSL-RR output word."""
    nhi, nlo = _mul128(shi, slo, _PCG_MUL_HI, _PCG_MUL_LO)
    nhi, nlo = _add128(nhi, nlo, ihi, ilo)
    rot = nhi >> uint64(58)
    x = nhi ^ nlo
    out = (x >> rot) | (x << ((uint64(64) - rot) & uint64(63)))
    return nhi, nlo, out


@njit(cache=True, nogil=True, inline="always")
def _next_uniform(shi, slo, ihi, ilo):
    """Next open-interval uniform: top 52 bits of the word, centered.

    Both products are exact, so the value matches the UniformStream
    transform bit for bit.
    """
    shi, slo, raw = _pcg_next(shi, slo, ihi, ilo)
    u = (raw >> uint64(12)) * _OPEN_SCALE + _HALF_STEP
    return shi, slo, u


@njit(cache=True, nogil=True)
def _pcg_jump(shi, slo, ihi, ilo, n):
    """Jump the LCG forward by n steps in O(log n) (arbitrary-stride advance)."""
    amhi, amlo = uint64(0), uint64(1)
    aphi, aplo = uint64(0), uint64(0)
    cmhi, cmlo = _PCG_MUL_HI, _PCG_MUL_LO
    cphi, cplo = ihi, ilo
    while n > 0:
        if n & 1:
            amhi, amlo = _mul128(amhi, amlo, cmhi, cmlo)
            aphi, aplo = _mul128(aphi, aplo, cmhi, cmlo)
            aphi, aplo = _add128(aphi, aplo, cphi, cplo)
        thi, tlo = _add128(cmhi, cmlo, uint64(0), uint64(1))
        cphi, cplo = _mul128(thi, tlo, cphi, cplo)
        cmhi, cmlo = _mul128(cmhi, cmlo, cmhi, cmlo)
        n >>= 1
    nhi, nlo = _mul128(shi, slo, amhi, amlo)
    return _add128(nhi, nlo, aphi, aplo)


@njit(cache=True, nogil=True)
def _uniform_block(shi, slo, ihi, ilo, out):
    """Fill ``out`` with consecutive uniforms (used only by tests)."""
    for i in range(out.size):
        shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
        out[i] = u
    return shi, slo


@njit(cache=True, nogil=True)
def _envelope_runs(shi, slo, ihi, ilo, up, down, count, max_steps, steps, states):
    """Independent envelope runs from (0, N); steps[i] = -1 on timeout."""
    n = up.size - 1
    up_thr = 1.0 - up
    consumed = 0
    for s in range(count):
        lo = 0
        hi = n
        taken = 0
        steps[s] = -1
        states[s] = -1
        while taken < max_steps:
            shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
            taken += 1
            if u > up_thr[lo]:
                lo += 1
            elif u < down[lo]:
                lo -= 1
            if u > up_thr[hi]:
                hi += 1
            elif u < down[hi]:
                hi -= 1
            if lo == hi:
                steps[s] = taken
                states[s] = lo
                break
        consumed += taken
    return consumed, FLAG_OK


@njit(cache=True, nogil=True)
def _doubling_runs(
    shi, slo, ihi, ilo, up, down, count, max_horizon, scratch, values, horizons
):
    """Doubling CFTP samples; each sample owns a fresh stretch of the stream.

    scratch[j] holds the uniform at past index -(j+1); epoch t reveals
    scratch[t/2..t-1], sweeps the envelope over scratch[t-1]..scratch[t/2]
    (past-to-recent), and on coalescence replays scratch[t/2-1]..scratch[0].
    """
    n = up.size - 1
    up_thr = 1.0 - up
    consumed = 0
    for s in range(count):
        t = 2
        filled = 0
        while True:
            if t > scratch.size:
                return consumed, FLAG_GROW if t <= max_horizon else FLAG_CAP
            if t > max_horizon:
                return consumed, FLAG_CAP
            for j in range(filled, t):
                shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
                scratch[j] = u
            consumed += t - filled
            filled = t
            half = t >> 1
            lo = 0
            hi = n
            j = t - 1
            while j >= half and lo != hi:
                u = scratch[j]
                if u > up_thr[lo]:
                    lo += 1
                elif u < down[lo]:
                    lo -= 1
                if u > up_thr[hi]:
                    hi += 1
                elif u < down[hi]:
                    hi -= 1
                j -= 1
            if lo == hi:
                while j >= half:
                    u = scratch[j]
                    if u > up_thr[lo]:
                        lo += 1
                    elif u < down[lo]:
                        lo -= 1
                    j -= 1
                for j2 in range(half - 1, -1, -1):
                    u = scratch[j2]
                    if u > up_thr[lo]:
                        lo += 1
                    elif u < down[lo]:
                        lo -= 1
                values[s] = lo
                horizons[s] = t
                break
            t <<= 1
    return consumed, FLAG_OK


@njit(cache=True, nogil=True)
def _read_once_runs(
    shi, slo, ihi, ilo, up, down, block, count, max_blocks, values, firsts, seconds
):
    """Read-once CFTP samples, consuming the stream in blocks of ``block``.

    Search phase: envelope per block until a block coalesces; its endpoint
    becomes the candidate.  Confirm phase: per block, envelope plus the
    candidate chain; a non-coalescing block replaces the candidate with its
    propagated image, a coalescing block ends the sample with the pre-block
    candidate.  Once the envelope of a block has met, the block's remaining
    uniforms can no longer change the outcome, so the stream is jumped to the
    block boundary (they are consumed unread).
    """
    n = up.size - 1
    up_thr = 1.0 - up
    consumed = 0
    for s in range(count):
        # search for a coalescing block
        blocks_first = 0
        x = -1
        while x < 0:
            if blocks_first >= max_blocks:
                return consumed, FLAG_CAP
            blocks_first += 1
            lo = 0
            hi = n
            j = 0
            while j < block and lo != hi:
                shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
                j += 1
                if u > up_thr[lo]:
                    lo += 1
                elif u < down[lo]:
                    lo -= 1
                if u > up_thr[hi]:
                    hi += 1
                elif u < down[hi]:
                    hi -= 1
            if lo == hi:
                while j < block:
                    shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
                    j += 1
                    if u > up_thr[lo]:
                        lo += 1
                    elif u < down[lo]:
                        lo -= 1
                x = lo
            consumed += block
        # confirm against further blocks
        blocks_second = 0
        while True:
            if blocks_first + blocks_second >= max_blocks:
                return consumed, FLAG_CAP
            blocks_second += 1
            lo = 0
            hi = n
            y = x
            j = 0
            while j < block and lo != hi:
                shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
                j += 1
                if u > up_thr[lo]:
                    lo += 1
                elif u < down[lo]:
                    lo -= 1
                if u > up_thr[hi]:
                    hi += 1
                elif u < down[hi]:
                    hi -= 1
                if u > up_thr[y]:
                    y += 1
                elif u < down[y]:
                    y -= 1
            consumed += block
            if lo == hi:
                shi, slo = _pcg_jump(shi, slo, ihi, ilo, block - j)
                break
            x = y
        values[s] = x
        firsts[s] = blocks_first
        seconds[s] = blocks_second
    return consumed, FLAG_OK


@njit(cache=True, nogil=True)
def _first_passage_runs(
    shi, slo, ihi, ilo, up, down, start, target, count, max_steps, steps
):
    """Single-chain first-passage times from ``start`` to ``target``."""
    up_thr = 1.0 - up
    consumed = 0
    for s in range(count):
        x = start
        taken = 0
        while x != target:
            if taken >= max_steps:
                return consumed, FLAG_CAP
            shi, slo, u = _next_uniform(shi, slo, ihi, ilo)
            taken += 1
            if u > up_thr[x]:
                x += 1
            elif u < down[x]:
                x -= 1
        consumed += taken
        steps[s] = taken
    return consumed, FLAG_OK
