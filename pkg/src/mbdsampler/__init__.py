"""Exact sampling from finite discrete distributions via monotone
birth-and-death chains: doubling CFTP, read-once CFTP, analytical
running-time bounds, and a statistical verification harness."""

from .analysis import (
    BoundSet,
    DoublingBounds,
    ReadOnceBounds,
    SimpleBoundsReport,
    TaggedBound,
    beta,
    block_cost,
    bound_set,
    doubling_bounds,
    expected_down_time,
    expected_up_time,
    optimal_block_multiplier,
    read_once_bounds,
    simple_bounds,
    theta,
)
from .distribution import (
    SummationMode,
    TargetDistribution,
    from_weights,
    gamma_ratio,
    gamma_ratios,
    geometric,
    load_weights,
    normalized_pi,
    sum_weights,
    zipf,
)
from .kernel import (
    BDKernel,
    GammaTrend,
    KernelConstructionError,
    MonotoneReport,
    StationaryCheck,
    build_kernel,
    gamma_monotonicity,
    stationary_residual,
    validate_monotone,
)
from .rng import PastBuffer, UniformStream, worker_stream
from .samplers import (
    BatchResult,
    CumulativeTable,
    SampleResult,
    SamplingCapExceeded,
    default_block_size,
    doubling_sample,
    doubling_sample_many,
    inverse_transform_sample,
    inverse_transform_sample_many,
    read_once_sample,
    read_once_sample_many,
)
from .stats import (
    BoundCheck,
    ChiSquareResult,
    RunReport,
    TimeStats,
    chi_square_test,
    make_run_report,
    summarize_times,
    time_stats,
    total_variation,
)
from .update import (
    CoalescenceResult,
    Envelope,
    TimedOut,
    phi,
    simulate_coalescence,
    simulate_coalescence_many,
    step_envelope,
)

__version__ = "0.1.0"
