#!/usr/bin/env python3
"""Benchmark the jitted simulation kernels against the pure-numpy fallback.

Both backends implement one written arithmetic contract and produce
bit-identical transcripts; this script measures only how fast each one gets
there.  The first jitted call compiles (and is excluded via warmup).

Two tables: end-to-end ``run_fable`` (kernel + transcript assembly) and the
raw kernel alone, where the jit advantage is undiluted.

Usage::

    python3 benchmarks/backend_bench.py [--pairs 100000 200000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import importlib
import os
import statistics
import time

from steerlab.backend import ENV_VAR
from steerlab.protocols import (
    FableConfig,
    _axis_bases,
    _bell_rows,
    _uniforms,
    prepare_quartet,
    run_fable,
)
from steerlab.states import singlet

CONFIGS = (
    ("quartet/case1/first", dict(preparation="quartet", strategy="case1", ordering="first")),
    ("quartet/case2/last", dict(preparation="quartet", strategy="case2", ordering="last")),
    ("direct2/case2/first", dict(preparation="direct2", strategy="case2", ordering="first")),
)

KERNELS = {
    name: importlib.import_module(f"steerlab._kernels_{name}")
    for name in ("numba", "numpy")
}


def run_once(backend: str, kwargs: dict, n_pairs: int, seed: int) -> float:
    os.environ[ENV_VAR] = backend
    config = FableConfig(n_pairs=n_pairs, seed=seed, stat_tol=0.9, **kwargs)
    t0 = time.perf_counter()
    run_fable(config)
    return time.perf_counter() - t0


def kernel_once(backend: str, n_pairs: int, seed: int, carol_case: int) -> float:
    kernels = KERNELS[backend]
    psi = prepare_quartet().vec.copy()
    args = (
        psi,
        _axis_bases(),
        _bell_rows(),
        singlet().vec.copy(),
        carol_case,
        True,
        _uniforms(seed, n_pairs, 6),
    )
    t0 = time.perf_counter()
    kernels.fable_quartet(*args)
    return time.perf_counter() - t0


def median(samples) -> float:
    return statistics.median(samples)


def print_table(title: str, rows: list) -> None:
    header = f"{'  ' + title:<22} {'pairs':>9} {'numba (s)':>10} {'numpy (s)':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, n_pairs, t_nb, t_np in rows:
        print(
            f"{name:<22} {n_pairs:>9} {t_nb:>10.4f} {t_np:>10.4f} "
            f"{t_np / t_nb:>7.2f}x"
        )
    print()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, nargs="+", default=[100_000])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    # warm the jit compilation outside the timed region
    for _, kwargs in CONFIGS:
        run_once("numba", kwargs, 64, 0)
    kernel_once("numba", 64, 0, 2)

    end_to_end = []
    for n_pairs in args.pairs:
        for name, kwargs in CONFIGS:
            t_nb = median(
                run_once("numba", kwargs, n_pairs, s) for s in range(args.repeats)
            )
            t_np = median(
                run_once("numpy", kwargs, n_pairs, s) for s in range(args.repeats)
            )
            end_to_end.append((name, n_pairs, t_nb, t_np))
    print_table("end-to-end run", end_to_end)

    kernel_rows = []
    for n_pairs in args.pairs:
        for case in (1, 2):
            t_nb = median(
                kernel_once("numba", n_pairs, s, case) for s in range(args.repeats)
            )
            t_np = median(
                kernel_once("numpy", n_pairs, s, case) for s in range(args.repeats)
            )
            kernel_rows.append((f"quartet kernel case{case}", n_pairs, t_nb, t_np))
    print_table("kernel only", kernel_rows)
    os.environ.pop(ENV_VAR, None)


if __name__ == "__main__":
    main()
