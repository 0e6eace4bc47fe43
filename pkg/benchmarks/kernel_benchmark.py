#!/usr/bin/env python3
"""Benchmark the shift-table counting kernel against the direct-sum oracle along a prime ladder."""

from __future__ import annotations

import argparse
import asyncio
import statistics
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
import sympy

from ffprog import (
    GridFunction,
    WeightFunction,
    context_for,
    counting_lambda,
    dual_F,
    oracle_lambda,
    standard_system,
    u_norm,
)
from ffprog.workers import map_in_threads

KERNELS = ("lambda", "oracle", "dual", "u3")


@dataclass
class KernelSummary:
    kernel: str
    p: int
    mean_ms: float
    p95_ms: float
    repeats: int
    max_abs_diff: float | None = None


def _time(call: Callable[[], object], repeats: int) -> tuple[List[float], object]:
    latencies: List[float] = []
    result: object = None
    for _ in range(repeats):
        started = time.perf_counter()
        result = call()
        latencies.append(time.perf_counter() - started)
    return latencies, result


def _p95(values: List[float]) -> float:
    if len(values) == 1:
        return values[0]
    return statistics.quantiles(values, n=20)[-1]


def run_prime(
    p: int, dimension: int, kernels: List[str], repeats: int, seed: int
) -> List[KernelSummary]:
    ctx = context_for(p)
    system = standard_system(dimension)
    rng = np.random.default_rng([seed, p])
    theta = WeightFunction(p, np.exp(2j * np.pi * rng.random(p)))
    fs = [GridFunction.random_bounded(p, dimension, rng) for _ in range(system.k + 1)]

    calls: dict[str, Callable[[], object]] = {
        "lambda": lambda: counting_lambda(theta, fs, system, ctx),
        "oracle": lambda: oracle_lambda(theta, fs, system, ctx),
        "dual": lambda: dual_F(theta, fs[:1], (0,) * (system.k - 1), system, ctx),
        "u3": lambda: u_norm(theta, 3),
    }
    summaries: List[KernelSummary] = []
    fast: complex | None = None
    for kernel in kernels:
        latencies, result = _time(calls[kernel], repeats)
        summary = KernelSummary(
            kernel=kernel,
            p=p,
            mean_ms=statistics.mean(latencies) * 1000,
            p95_ms=_p95(latencies) * 1000,
            repeats=repeats,
        )
        if kernel == "lambda":
            fast = complex(result)  # type: ignore[arg-type]
        elif kernel == "oracle" and fast is not None:
            summary.max_abs_diff = abs(fast - complex(result))  # type: ignore[arg-type]
        summaries.append(summary)
    return summaries


def format_summary_table(results: List[KernelSummary]) -> str:
    headers = ["kernel", "p", "mean (ms)", "p95 (ms)", "repeats", "|fast - oracle|"]
    rows = [
        [
            result.kernel,
            str(result.p),
            f"{result.mean_ms:.3f}",
            f"{result.p95_ms:.3f}",
            str(result.repeats),
            "" if result.max_abs_diff is None else f"{result.max_abs_diff:.2e}",
        ]
        for result in results
    ]

    col_widths = [
        max(len(header), *(len(row[idx]) for row in rows)) for idx, header in enumerate(headers)
    ]

    def _format_row(row: List[str]) -> str:
        return " | ".join(cell.ljust(col_widths[idx]) for idx, cell in enumerate(row))

    lines = [_format_row(headers)]
    lines.append("-+-".join("-" * width for width in col_widths))
    lines.extend(_format_row(row) for row in rows)
    return "\n".join(lines)


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--low", type=int, default=5, help="Smallest prime in the ladder")
    parser.add_argument("--high", type=int, default=31, help="Largest prime in the ladder")
    parser.add_argument("--dimension", type=int, default=2, choices=[1, 2])
    parser.add_argument(
        "--kernels", nargs="+", choices=list(KERNELS), default=list(KERNELS), help="Kernels to time"
    )
    parser.add_argument("--repeats", type=int, default=5, help="Timed calls per kernel and prime")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Primes benchmarked concurrently (timings get noisier above 1)",
    )
    return parser.parse_args()


async def async_main() -> None:
    args = parse_args()
    primes = [int(p) for p in sympy.primerange(args.low, args.high + 1)]
    if not primes:
        raise SystemExit("No primes in the requested range")
    if args.repeats < 1:
        raise SystemExit("--repeats must be at least 1")

    def run(p: int) -> List[KernelSummary]:
        print(f"Running kernels for p={p}...")
        return run_prime(p, args.dimension, args.kernels, args.repeats, args.seed)

    batches = await map_in_threads(run, primes, max(args.threads, 1))
    results = [summary for batch in batches for summary in batch]

    print("\n=== Benchmark summary ===")
    print(format_summary_table(results))


def main() -> None:
    asyncio.run(async_main())


if __name__ == "__main__":
    main()
