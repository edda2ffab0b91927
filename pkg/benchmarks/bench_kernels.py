#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallbacks.

Both implementations are always importable from spquad._kernels, so a single
process can time them side by side no matter what SPQUAD_NO_NUMBA says.

Usage:  python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from spquad import _kernels
from spquad.series import _multiset_tables


def time_fn(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_level_step(sigma, K, repeat):
    counts_levels, trans_levels = _multiset_tables(sigma, K)
    rng = np.random.default_rng(1)
    Vss = rng.uniform(-1, 1, (sigma, sigma))
    vroot = rng.uniform(-1, 1, sigma)

    def run(step):
        vals = np.ones(1)
        for k in range(K):
            vals = step(vals, counts_levels[k], trans_levels[k], Vss, vroot)
        return vals

    rows = []
    run(_kernels.level_step)  # warm the JIT outside the timer
    t_fast = time_fn(lambda: run(_kernels.level_step), repeat)
    t_numpy = time_fn(lambda: run(_kernels.level_step_numpy), repeat)
    label = "numba" if _kernels.USING_NUMBA else "numpy(flagged)"
    rows.append((f"level_step sigma={sigma} K={K}", label, t_fast, t_numpy))
    return rows


def bench_rk4(m, n_steps, repeat):
    rng = np.random.default_rng(2)
    V = rng.uniform(-0.5, 0.5, (m, m))
    x0 = rng.uniform(0.5, 1.0, m)
    _kernels.rk4_frame(V, x0, 0.0, 8, 1e-4, 1e-4)  # warm
    t_fast = time_fn(
        lambda: _kernels.rk4_frame(V, x0, 0.0, n_steps, 1e-5, 1e-5), repeat)
    t_numpy = time_fn(
        lambda: _kernels.rk4_frame_numpy(V, x0, 0.0, n_steps, 1e-5, 1e-5),
        repeat)
    label = "numba" if _kernels.USING_NUMBA else "numpy(flagged)"
    return [(f"rk4_frame m={m} steps={n_steps}", label, t_fast, t_numpy)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = []
    rows += bench_level_step(sigma=3, K=30, repeat=args.repeat)
    rows += bench_level_step(sigma=5, K=40, repeat=args.repeat)
    rows += bench_rk4(m=3, n_steps=200_000, repeat=args.repeat)
    rows += bench_rk4(m=8, n_steps=100_000, repeat=args.repeat)
    print(f"{'case':36s} {'selected':>15s} {'selected_s':>12s} "
          f"{'numpy_s':>12s} {'speedup':>8s}")
    for case, label, fast, slow in rows:
        print(f"{case:36s} {label:>15s} {fast:12.6f} {slow:12.6f} "
              f"{slow / fast:8.2f}")


if __name__ == "__main__":
    main()
