"""Sampler mechanics: accounting, reproducibility, pure/batch agreement.

Full-strength exactness (chi-square over the whole grid at 1e6 samples) lives
in test_acceptance; here the same machinery is exercised at smaller sizes.
"""

import numpy as np
import pytest

from mbdsampler import (
    CumulativeTable,
    PastBuffer,
    SamplingCapExceeded,
    UniformStream,
    build_kernel,
    default_block_size,
    doubling_sample,
    doubling_sample_many,
    from_weights,
    geometric,
    inverse_transform_sample,
    inverse_transform_sample_many,
    normalized_pi,
    read_once_sample,
    read_once_sample_many,
    theta,
    total_variation,
    zipf,
)
from mbdsampler.distribution import SummationMode


class TestDoubling:
    def test_single_state_short_circuits(self):
        k = build_kernel(from_weights([2.0]))
        stream = UniformStream(0)
        result = doubling_sample(k, PastBuffer(stream))
        assert (result.value, result.uniforms_used) == (0, 0)
        assert stream.position == 0

    def test_reproducible_given_seed(self):
        k = build_kernel(geometric(0.5, 4))
        first = doubling_sample(k, PastBuffer(UniformStream(314)))
        second = doubling_sample(k, PastBuffer(UniformStream(314)))
        assert first == second

    def test_horizon_is_power_of_two_and_buffer_exact(self):
        k = build_kernel(geometric(0.5, 8))
        for seed in range(30):
            buf = PastBuffer(UniformStream(seed))
            result = doubling_sample(k, buf)
            assert result.uniforms_used >= 2
            assert result.uniforms_used & (result.uniforms_used - 1) == 0
            assert buf.generated == result.uniforms_used

    def test_batch_matches_sequential_on_shared_stream(self):
        k = build_kernel(zipf(1.5, 12))
        stream = UniformStream(99)
        sequential = [doubling_sample(k, PastBuffer(stream)) for _ in range(300)]
        batch_stream = UniformStream(99)
        batch = doubling_sample_many(k, 300, batch_stream)
        assert [s.value for s in sequential] == batch.values.tolist()
        assert [s.uniforms_used for s in sequential] == batch.uniforms_used.tolist()
        assert stream.position == batch_stream.position

    def test_horizon_cap_raises(self):
        k = build_kernel(geometric(0.99, 80))
        with pytest.raises(SamplingCapExceeded):
            doubling_sample(k, PastBuffer(UniformStream(1)), max_horizon=4)
        with pytest.raises(SamplingCapExceeded):
            doubling_sample_many(k, 5, UniformStream(1), max_horizon=4)

    def test_scratch_growth_is_transparent(self):
        k = build_kernel(geometric(0.5, 10))
        reference = doubling_sample_many(k, 100, UniformStream(23))
        tiny = doubling_sample_many(k, 100, UniformStream(23), initial_scratch=2)
        assert np.array_equal(reference.values, tiny.values)
        assert np.array_equal(reference.uniforms_used, tiny.uniforms_used)

    def test_values_distribution_sanity(self):
        d = geometric(0.5, 6)
        k = build_kernel(d)
        batch = doubling_sample_many(k, 20000, UniformStream(5))
        hist = np.bincount(batch.values, minlength=7)
        assert total_variation(hist, normalized_pi(d)) < 0.02


class TestReadOnce:
    def test_single_state_short_circuits(self):
        k = build_kernel(from_weights([2.0]))
        stream = UniformStream(0)
        result = read_once_sample(k, 10, stream)
        assert (result.value, result.uniforms_used) == (0, 0)
        assert stream.position == 0

    def test_accounting_identity(self):
        k = build_kernel(geometric(0.5, 10))
        stream = UniformStream(17)
        for _ in range(30):
            result = read_once_sample(k, 60, stream)
            first, second = result.blocks
            assert first >= 1 and second >= 1
            assert result.uniforms_used == (first + second) * 60
            assert result.uniforms_used % 60 == 0

    def test_batch_matches_sequential_on_shared_stream(self):
        k = build_kernel(zipf(2.0, 9))
        stream = UniformStream(42)
        block = 50
        sequential = [read_once_sample(k, block, stream) for _ in range(300)]
        batch_stream = UniformStream(42)
        batch = read_once_sample_many(k, block, 300, batch_stream)
        assert [s.value for s in sequential] == batch.values.tolist()
        assert [s.blocks for s in sequential] == list(
            zip(batch.blocks_first.tolist(), batch.blocks_second.tolist())
        )
        assert stream.position == batch_stream.position

    def test_block_cap_raises(self):
        k = build_kernel(geometric(0.5, 10))
        with pytest.raises(SamplingCapExceeded):
            read_once_sample(k, 180, UniformStream(3), max_blocks=1)
        k_slow = build_kernel(geometric(0.99, 80))
        with pytest.raises(SamplingCapExceeded):
            read_once_sample_many(k_slow, 2, 3, UniformStream(3), max_blocks=4)

    def test_rejects_degenerate_block(self):
        k = build_kernel(geometric(0.5, 4))
        with pytest.raises(ValueError):
            read_once_sample(k, 0, UniformStream(0))
        with pytest.raises(ValueError):
            read_once_sample_many(k, 0, 1, UniformStream(0))

    def test_values_distribution_sanity(self):
        d = zipf(2.0, 8)
        k = build_kernel(d)
        block = default_block_size(theta(d, k), 8)
        batch = read_once_sample_many(k, block, 20000, UniformStream(6))
        hist = np.bincount(batch.values, minlength=9)
        assert total_variation(hist, normalized_pi(d)) < 0.02


class TestDefaultBlockSize:
    def test_examples(self):
        assert default_block_size(3.0, 10) == 180
        assert default_block_size(2.1, 5) == 90
        assert default_block_size(1.0, 1) == 6

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            default_block_size(0.0, 10)
        with pytest.raises(ValueError):
            default_block_size(1.0, 0)


class TestUnnormalizedInvariance:
    def test_power_of_two_scaling_gives_identical_streams(self):
        w = np.array([0.7, 1.3, 0.4, 2.2, 0.9])
        k1 = build_kernel(from_weights(w))
        k2 = build_kernel(from_weights(1024.0 * w))
        assert np.array_equal(k1.up, k2.up) and np.array_equal(k1.down, k2.down)
        b1 = doubling_sample_many(k1, 500, UniformStream(8))
        b2 = doubling_sample_many(k2, 500, UniformStream(8))
        assert np.array_equal(b1.values, b2.values)
        r1 = read_once_sample_many(k1, 40, 500, UniformStream(9))
        r2 = read_once_sample_many(k2, 40, 500, UniformStream(9))
        assert np.array_equal(r1.values, r2.values)

    def test_generic_scaling_keeps_kernels_close(self):
        w = np.exp(np.random.default_rng(10).uniform(-1, 1, size=20))
        k1 = build_kernel(from_weights(w))
        k2 = build_kernel(from_weights(1e6 * w))
        assert np.max(np.abs(k1.up - k2.up)) < 1e-12
        assert np.max(np.abs(k1.down - k2.down)) < 1e-12


class TestInverseTransform:
    def test_two_state_split(self):
        d = from_weights([1.0, 1.0])
        assert inverse_transform_sample(d, 0.25) == 0
        assert inverse_transform_sample(d, 0.75) == 1

    def test_hand_cumulative(self):
        d = from_weights([1.0, 2.0, 1.0])
        table = CumulativeTable(d)
        assert table.sigma == pytest.approx([0.25, 0.75, 1.0], rel=1e-15)
        assert table.lookup(0.5) == 1
        assert table.lookup(0.25) == 0  # boundary: sigma(0) >= u picks 0
        assert inverse_transform_sample(d, 0.5) == 1

    def test_top_state_reachable_despite_rounding(self):
        d = from_weights([1.0, 1e-12])
        table = CumulativeTable(d)
        assert table.lookup(1 - 2**-53) == 1

    @pytest.mark.parametrize("mode", list(SummationMode))
    def test_modes_agree_on_small_support(self, mode):
        d = geometric(0.5, 10)
        table = CumulativeTable(d, mode)
        us = UniformStream(11).take(1000)
        baseline = CumulativeTable(d).lookup_many(us)
        assert np.array_equal(table.lookup_many(us), baseline)

    def test_rejects_u_outside_open_interval(self):
        d = from_weights([1.0, 1.0])
        with pytest.raises(ValueError):
            inverse_transform_sample(d, 0.0)
        with pytest.raises(ValueError):
            inverse_transform_sample(d, 1.0)

    def test_batch_uses_one_uniform_per_sample(self):
        d = geometric(0.5, 10)
        stream = UniformStream(12)
        batch = inverse_transform_sample_many(d, 5000, stream)
        assert stream.position == 5000
        assert np.all(batch.uniforms_used == 1)
        hist = np.bincount(batch.values, minlength=11)
        assert total_variation(hist, normalized_pi(d)) < 0.03
