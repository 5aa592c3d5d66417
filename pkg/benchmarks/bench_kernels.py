#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy reference implementation.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from nfsg.kernels import _reference

try:
    from nfsg.kernels import _fastkern
except ImportError:
    _fastkern = None

LAM = 0.010706873500714285  # 28 GHz


def _time(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(quick: bool):
    rng = np.random.default_rng(0)
    n_pairs = 100_000 if quick else 400_000
    trials = 400 if quick else 2000
    n_tau = 300 if quick else 1200

    ta = rng.uniform(-1.2, 1.2, n_pairs)
    ra = rng.uniform(0.5, 300.0, n_pairs)
    tb = rng.uniform(-1.2, 1.2, n_pairs)
    rb = rng.uniform(0.5, 300.0, n_pairs)
    theta = rng.uniform(-1.0, 1.0, (trials, 15))
    r = rng.uniform(1.0, 150.0, (trials, 15))
    g = rng.uniform(0.0, 1.0, 16_000)
    w = rng.dirichlet(np.ones(16_000))
    t = rng.uniform(0.0, 2000.0, n_tau)

    cases = [
        (f"gain_pairs      ({n_pairs} pairs, N=256)",
         lambda mod: mod.gain_pairs(ta, ra, tb, rb, 256, LAM)),
        (f"interference    ({trials} trials x 15 users, N=256)",
         lambda mod: mod.interference_sums(theta, r, 256, LAM)),
        (f"cf_reduce       (16k clusters x {n_tau} t)",
         lambda mod: mod.cf_reduce(g, w, t)),
    ]

    print(f"{'kernel':<45}{'numpy':>10}{'compiled':>10}{'speedup':>9}")
    for name, runner in cases:
        t_ref = _time(lambda: runner(_reference))
        if _fastkern is not None:
            t_fast = _time(lambda: runner(_fastkern))
            out_fast = runner(_fastkern)
            out_ref = runner(_reference)
            assert np.allclose(out_fast, out_ref, atol=1e-9), name
            print(f"{name:<45}{t_ref:>9.3f}s{t_fast:>9.3f}s{t_ref / t_fast:>8.1f}x")
        else:
            print(f"{name:<45}{t_ref:>9.3f}s{'n/a':>10}{'':>9}")
    if _fastkern is None:
        print("\ncompiled kernels unavailable (build the extension to compare)")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    bench(parser.parse_args().quick)
