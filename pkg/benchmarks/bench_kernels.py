#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py [--grid 1001] [--trials 512]

The same kernels are selected at import time by FASIM_DISABLE_NUMBA; here
both implementations are timed explicitly so the comparison does not depend
on the environment.
"""

import argparse
import math
import time

import numpy as np

from fasim import kernels


def timeit(fn, *args, repeats=3):
    fn(*args)  # warm-up (and numba compilation)
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--grid", type=int, default=1001)
    parser.add_argument("--trials", type=int, default=512)
    parser.add_argument("--components", type=int, default=256)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    b, m, g = args.trials, args.components, args.grid
    angles = rng.uniform(0, 2 * np.pi, (b, m))
    cos_t = np.cos(angles)
    sin_t = np.sin(angles)
    phases = rng.uniform(0, 2 * np.pi, (b, m))
    tau = 1e-3

    metric = np.abs(kernels.sos_synthesize_numpy(cos_t[:64], phases[:64], g, tau)) ** 2
    thresholds = np.logspace(-2, 1, 200)

    cases = [
        ("sos_synthesize", (cos_t, phases, g, tau)),
        ("sos_synthesize_pair", (cos_t, sin_t, phases, g, tau, 0.25)),
        ("upcross_counts", (metric, thresholds)),
        ("below_counts", (metric, thresholds)),
    ]
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for name, call_args in cases:
        t_np = timeit(getattr(kernels, name + "_numpy"), *call_args)
        numba_fn = getattr(kernels, name + "_numba", None)
        if numba_fn is None:
            print(f"{name:<22}{t_np * 1e3:>12.1f}{'n/a':>12}{'':>9}")
            continue
        t_nb = timeit(numba_fn, *call_args)
        print(f"{name:<22}{t_np * 1e3:>12.1f}{t_nb * 1e3:>12.1f}"
              f"{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
