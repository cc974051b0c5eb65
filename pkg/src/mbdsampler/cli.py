"""Command-line front end: kernel / bounds / sample / verify / bench.

Every run is determined by its flags: the same configuration yields a
byte-identical report apart from the ``timestamp`` field.  Exit codes:
0 success, 1 validation or statistical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, samplers, stats
from .distribution import (
    TargetDistribution,
    geometric,
    load_weights,
    normalized_pi,
    zipf,
)
from .kernel import build_kernel, kernel_dump, validate_monotone
from .rng import UniformStream

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Echo of the flags that fully determine a run."""

    dist: str
    xi: float | None
    alpha: float | None
    n: int | None
    weights_file: str | None
    sampler: str
    count: int
    seed: int
    block_multiplier: int
    jobs: int
    significance: float
    tv_threshold: float | None

    def to_dict(self) -> dict:
        return {
            "dist": self.dist,
            "xi": self.xi,
            "alpha": self.alpha,
            "n": self.n,
            "weights_file": self.weights_file,
            "sampler": self.sampler,
            "count": self.count,
            "seed": self.seed,
            "block_multiplier": self.block_multiplier,
            "jobs": self.jobs,
            "significance": self.significance,
            "tv_threshold": self.tv_threshold,
        }


def _add_dist_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dist", choices=("geometric", "zipf", "file"), required=True,
        help="target family: geometric(xi), zipf(alpha), or a weights file",
    )
    parser.add_argument("--xi", type=float, help="geometric ratio in (0,1)")
    parser.add_argument("--alpha", type=float, help="zipf exponent > 1")
    parser.add_argument("--n", type=int, help="largest state index N")
    parser.add_argument("--weights-file", help="path to weights (text or JSON array)")


def _usage_error(message: str) -> SystemExit:
    print(f"error: {message}", file=sys.stderr)
    return SystemExit(EXIT_USAGE)


def _make_distribution(args: argparse.Namespace) -> TargetDistribution:
    if args.dist == "geometric":
        if args.xi is None or args.n is None:
            raise _usage_error("geometric needs --xi and --n")
        return geometric(args.xi, args.n)
    if args.dist == "zipf":
        if args.alpha is None or args.n is None:
            raise _usage_error("zipf needs --alpha and --n")
        return zipf(args.alpha, args.n)
    if args.weights_file is None:
        raise _usage_error("--dist file needs --weights-file")
    return load_weights(args.weights_file)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def cmd_kernel(args: argparse.Namespace) -> int:
    d = _make_distribution(args)
    k = build_kernel(d)
    dump = kernel_dump(k)
    if not np.isfinite(dump["monotone_slack_min"]):
        dump["monotone_slack_min"] = None
    _emit(dump)
    report = validate_monotone(k)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_bounds(args: argparse.Namespace) -> int:
    d = _make_distribution(args)
    k = build_kernel(d)
    bounds = analysis.bound_set(d, k, b=args.block_multiplier)
    payload = bounds.to_dict()
    payload["b_scan"] = [
        {"b": b, "beta": analysis.beta(b), "cost": analysis.block_cost(b)}
        for b in range(3, 13)
    ]
    payload["optimal_b"] = analysis.optimal_block_multiplier()
    _emit(payload)
    return EXIT_OK


def _run_shard(
    d: TargetDistribution,
    kernel,
    sampler: str,
    count: int,
    seed: int,
    shard: int,
    block_size: int,
) -> samplers.BatchResult:
    stream = UniformStream(seed, stream_index=shard)
    if sampler == "doubling":
        return samplers.doubling_sample_many(kernel, count, stream)
    if sampler == "readonce":
        return samplers.read_once_sample_many(kernel, block_size, count, stream)
    return samplers.inverse_transform_sample_many(d, count, stream)


def _run_samples(
    d: TargetDistribution, args: argparse.Namespace
) -> tuple[samplers.BatchResult, analysis.BoundSet | None, int]:
    """Draw args.count samples, sharded over args.jobs derived streams."""
    kernel = build_kernel(d)
    bounds = None
    block_size = 1
    if d.size_n >= 1:
        bounds = analysis.bound_set(d, kernel, b=args.block_multiplier)
        block_size = bounds.block_size
    jobs = max(1, args.jobs)
    shard_counts = [args.count // jobs] * jobs
    for i in range(args.count % jobs):
        shard_counts[i] += 1
    shard_counts = [c for c in shard_counts if c > 0]
    if len(shard_counts) <= 1:
        results = [
            _run_shard(d, kernel, args.sampler, args.count, args.seed, 0, block_size)
        ]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    _run_shard, d, kernel, args.sampler, c, args.seed, i, block_size
                )
                for i, c in enumerate(shard_counts)
            ]
            results = [f.result() for f in futures]
    merged = samplers.BatchResult(
        values=np.concatenate([r.values for r in results]),
        uniforms_used=np.concatenate([r.uniforms_used for r in results]),
        blocks_first=(
            np.concatenate([r.blocks_first for r in results])
            if results[0].blocks_first is not None
            else None
        ),
        blocks_second=(
            np.concatenate([r.blocks_second for r in results])
            if results[0].blocks_second is not None
            else None
        ),
    )
    return merged, bounds, block_size


def cmd_sample(args: argparse.Namespace) -> int:
    d = _make_distribution(args)
    batch, _, _ = _run_samples(d, args)
    if args.out == "csv":
        print("value,uniforms_used")
        for v, t in zip(batch.values, batch.uniforms_used):
            print(f"{v},{t}")
    else:
        _emit(
            {
                "values": batch.values.tolist(),
                "uniforms_used": batch.uniforms_used.tolist(),
            }
        )
    return EXIT_OK


_KIND_BY_SAMPLER = {"doubling": "doubling", "readonce": "readonce", "itm": "itm"}


def cmd_verify(args: argparse.Namespace) -> int:
    d = _make_distribution(args)
    batch, bounds, _ = _run_samples(d, args)
    config = ExperimentConfig(
        dist=args.dist,
        xi=args.xi,
        alpha=args.alpha,
        n=args.n,
        weights_file=args.weights_file,
        sampler=args.sampler,
        count=args.count,
        seed=args.seed,
        block_multiplier=args.block_multiplier,
        jobs=args.jobs,
        significance=args.significance,
        tv_threshold=args.tv_threshold,
    )
    report = stats.make_run_report(
        config.to_dict(),
        batch.values,
        batch.uniforms_used,
        normalized_pi(d),
        bounds,
        _KIND_BY_SAMPLER[args.sampler],
        blocks_first=batch.blocks_first,
        blocks_second=batch.blocks_second,
    )
    payload = report.to_dict()
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    _emit(payload)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_bench(args: argparse.Namespace) -> int:
    d = _make_distribution(args)
    rows = {}
    for sampler in ("doubling", "readonce", "itm"):
        sub = argparse.Namespace(**vars(args))
        sub.sampler = sampler
        start = time.perf_counter()
        batch, bounds, block_size = _run_samples(d, sub)
        elapsed = time.perf_counter() - start
        checks = []
        if bounds is not None and sampler != "itm":
            checks = stats.summarize_times(
                batch.uniforms_used,
                bounds,
                _KIND_BY_SAMPLER[sampler],
                blocks_first=batch.blocks_first,
                blocks_second=batch.blocks_second,
            )
        rows[sampler] = {
            "seconds_per_sample": elapsed / max(1, args.count),
            "uniforms_per_sample": float(np.mean(batch.uniforms_used)),
            "block_size": block_size if sampler == "readonce" else None,
            "bound_checks": [c.to_dict() for c in checks],
        }
    payload = {"count": args.count, "seed": args.seed, "samplers": rows}
    _emit(payload)
    ok = all(
        check["pass"] for row in rows.values() for check in row["bound_checks"]
    )
    return EXIT_OK if ok else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbd-sampler",
        description=(
            "Exact sampling from strictly positive finite discrete targets via "
            "monotone birth-and-death chains"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser("kernel", help="build and dump the transition kernel")
    _add_dist_flags(p_kernel)
    p_kernel.set_defaults(func=cmd_kernel)

    p_bounds = sub.add_parser("bounds", help="analytical running-time bounds")
    _add_dist_flags(p_bounds)
    p_bounds.add_argument("--block-multiplier", type=int, default=6)
    p_bounds.set_defaults(func=cmd_bounds)

    for name, func, help_text in (
        ("sample", cmd_sample, "draw samples"),
        ("verify", cmd_verify, "draw samples and verify exactness and bounds"),
        ("bench", cmd_bench, "compare samplers on time and randomness usage"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_dist_flags(p)
        if name != "bench":
            p.add_argument(
                "--sampler",
                choices=("doubling", "readonce", "itm"),
                default="doubling",
            )
        p.add_argument("--count", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--block-multiplier", type=int, default=6)
        p.add_argument("--jobs", type=int, default=1)
        if name == "sample":
            p.add_argument("--out", choices=("json", "csv"), default="json")
        if name == "verify":
            p.add_argument("--significance", type=float, default=1e-4)
            p.add_argument("--tv-threshold", type=float, default=None)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
