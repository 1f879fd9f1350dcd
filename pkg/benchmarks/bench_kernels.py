#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-Python fallback.

Builds both backends in-process (independently of DEATHLAB_NO_NUMBA),
drives each with identically-seeded streams, checks the outputs are
bit-identical, and reports the speedup.

Usage: python benchmarks/bench_kernels.py [--size N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from deathlab import kernels
from deathlab.rng import make_stream


def _gen(tag: str):
    return make_stream(2024, abs(hash(tag)) % 2**31).generator


def bench(name, runner, size):
    results = {}
    timings = {}
    for jit in (True, False):
        backend = kernels.get_backend(jit)
        if jit:
            runner(backend, _gen(name + "warmup"), 64)  # compile outside the timer
        t0 = time.perf_counter()
        results[jit] = runner(backend, _gen(name), size)
        timings[jit] = time.perf_counter() - t0
    identical = np.array_equal(results[True], results[False])
    speedup = timings[False] / timings[True] if timings[True] > 0 else float("inf")
    print(
        f"{name:<42} numba {timings[True]:8.4f}s   python {timings[False]:8.4f}s   "
        f"x{speedup:6.1f}   identical={identical}"
    )
    return identical


def binomial_small(backend, gen, size):
    out = np.empty(size, dtype=np.int64)
    backend.binomial_batch(gen, 10, 0.3, out)
    return out


def binomial_btrs(backend, gen, size):
    out = np.empty(size, dtype=np.int64)
    backend.binomial_batch(gen, 100000, 0.4, out)
    return out


def geometric(backend, gen, size):
    out = np.empty(size, dtype=np.int64)
    backend.geometric_batch(gen, 0.2, out)
    return out


def max_geometric(backend, gen, size):
    out = np.empty(size, dtype=np.int64)
    backend.max_geometric_batch(gen, 10**6, 0.1, out)
    return out


def extinction(backend, gen, size):
    out = np.empty(size, dtype=np.int64)
    backend.extinction_batch(gen, 50, kernels.CONSTANT, 0.2, 0.0, 10**6, out)
    return out


def single_drop(backend, gen, size):
    out = np.empty(size, dtype=np.uint8)
    backend.single_drop_batch(gen, 10, kernels.CONSTANT, 0.05, 0.0, out)
    return out


def first_passage(backend, gen, size):
    out_j = np.empty(size, dtype=np.int64)
    out_c = np.empty(size, dtype=np.int64)
    backend.first_passage_batch(gen, 3, 1e-4, 0, out_j, out_c)
    return out_j


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=200_000, help="draws per benchmark")
    args = parser.parse_args()
    print(f"batch size {args.size}, backends built side by side\n")
    all_ok = True
    all_ok &= bench("binomial x=10 c=0.3 (bernoulli sum)", binomial_small, args.size)
    all_ok &= bench("binomial x=1e5 c=0.4 (BTRS rejection)", binomial_btrs, args.size)
    all_ok &= bench("geometric c=0.2", geometric, args.size)
    all_ok &= bench("max-of-geometrics n=1e6 c=0.1", max_geometric, args.size)
    all_ok &= bench("extinction time n=50 c=0.2", extinction, args.size // 4)
    all_ok &= bench("single-drop path n=10 c=0.05", single_drop, args.size // 4)
    all_ok &= bench("first passage k=3 c=1e-4", first_passage, args.size)
    print("\nall outputs bit-identical across backends:", bool(all_ok))


if __name__ == "__main__":
    main()
