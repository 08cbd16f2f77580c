#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Usage: python benchmarks/bench_core.py [--steps N]
"""

import argparse
import time

import numpy as np

from boxball import _core_py
from boxball.bbs import UNBOUNDED, DynamicsParams, draw_coin_block
from boxball.rng import RngStream

try:
    from boxball import _core
except ImportError:
    _core = None


def bench(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=200_000)
    args = parser.parse_args()

    print(f"{'case':<28}{'compiled':>12}{'python':>12}{'speedup':>10}")
    for d, cap in [(2, UNBOUNDED), (3, UNBOUNDED), (5, 1), (8, 4)]:
        params = DynamicsParams(0.5, cap, d)
        coins = draw_coin_block(params, args.steps, RngStream(1, d).generator())
        w0 = np.zeros(d - 1, dtype=np.int64)
        eff = params.effective_capacity()
        t_py = bench(_core_py.gap_trajectory, w0, coins, eff, repeat=1)
        t_c = bench(_core.gap_trajectory, w0, coins, eff) if _core else float("nan")
        label = f"sweep d={d} c={params.capacity_label()}"
        print(f"{label:<28}{t_c:>11.3f}s{t_py:>11.3f}s{t_py / t_c:>9.1f}x")

    for d in (3, 6):
        kappa = RngStream(2, d).generator().integers(0, d, size=args.steps, dtype=np.int64)
        w0 = np.zeros(d - 1, dtype=np.int64)
        t_py = bench(_core_py.pushtasep_gap_trajectory, w0, kappa, repeat=1)
        t_c = bench(_core.pushtasep_gap_trajectory, w0, kappa) if _core else float("nan")
        label = f"pushtasep d={d}"
        print(f"{label:<28}{t_c:>11.3f}s{t_py:>11.3f}s{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
