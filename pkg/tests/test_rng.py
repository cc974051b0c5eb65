"""Uniform stream: reproducibility, open-interval guarantee, past buffer."""

import numpy as np
import pytest

from mbdsampler import PastBuffer, UniformStream, worker_stream
from mbdsampler import _engine


def test_same_seed_reproduces_exactly():
    a = UniformStream(42).take(64)
    b = UniformStream(42).take(64)
    assert np.array_equal(a, b)


def test_draws_strictly_inside_unit_interval():
    u = UniformStream(7).take(10**6)
    assert u.min() > 0.0
    assert u.max() < 1.0


def test_empirical_mean_near_half():
    u = UniformStream(11).take(10**6)
    assert abs(u.mean() - 0.5) < 0.002


def test_scalar_and_vector_draws_agree():
    s1 = UniformStream(3)
    singles = [s1.next() for _ in range(10)]
    s2 = UniformStream(3)
    assert np.array_equal(np.array(singles), s2.take(10))
    assert s1.position == s2.position == 10


def test_chunking_does_not_change_the_stream():
    s1 = UniformStream(5)
    whole = s1.take(100)
    s2 = UniformStream(5)
    parts = np.concatenate([s2.take(13), s2.take(1), s2.take(86)])
    assert np.array_equal(whole, parts)


def test_skip_matches_materialized_draws():
    s1 = UniformStream(9)
    ref = s1.take(50)
    s2 = UniformStream(9)
    s2.skip(30)
    assert np.array_equal(ref[30:], s2.take(20))
    assert s2.position == 50


def test_distinct_seeds_share_no_prefix():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = rng.integers(0, 2**63, size=2)
        if a == b:
            continue
        ua = UniformStream(int(a)).take(64)
        ub = UniformStream(int(b)).take(64)
        assert not np.array_equal(ua, ub)


def test_worker_streams_are_independent_of_root():
    root = UniformStream(21).take(64)
    w1 = worker_stream(21, 1).take(64)
    w2 = worker_stream(21, 2).take(64)
    assert not np.array_equal(root, w1)
    assert not np.array_equal(w1, w2)


def test_engine_generates_the_same_stream():
    s = UniformStream(123)
    ref = s.take(4096)
    s2 = UniformStream(123)
    w = [np.uint64(x) for x in s2.state_words()]
    out = np.empty(4096)
    _engine._uniform_block(w[0], w[1], w[2], w[3], out)
    assert np.array_equal(ref, out)


def test_engine_jump_matches_numpy_advance():
    s = UniformStream(55)
    w = [np.uint64(x) for x in s.state_words()]
    jumped = _engine._pcg_jump(w[0], w[1], w[2], w[3], 987654)
    s.skip(987654)
    assert tuple(int(x) for x in jumped) == s.state_words()[:2]


class TestPastBuffer:
    def test_repeated_reads_are_identical(self):
        buf = PastBuffer(UniformStream(1))
        assert buf.get(-1) == buf.get(-1)

    def test_extension_never_rewrites(self):
        eager = PastBuffer(UniformStream(2))
        deep_first = [eager.get(-4), eager.get(-2)]
        lazy = PastBuffer(UniformStream(2))
        shallow_first = [lazy.get(-2), lazy.get(-4)]
        assert deep_first[1] == shallow_first[0]
        assert deep_first[0] == shallow_first[1]

    def test_interleaved_growth_matches_one_shot(self):
        grown = PastBuffer(UniformStream(3))
        for t in (2, 4, 8, 16, 32, 64):
            for m in range(-t, 0):
                grown.get(m)
        oneshot = PastBuffer(UniformStream(3))
        assert all(grown.get(m) == oneshot.get(m) for m in range(-64, 0))

    def test_requires_negative_index(self):
        buf = PastBuffer(UniformStream(4))
        with pytest.raises(ValueError):
            buf.get(0)

    def test_generated_count(self):
        buf = PastBuffer(UniformStream(5))
        buf.get(-10)
        assert buf.generated == 10
