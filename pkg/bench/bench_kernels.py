#!/usr/bin/env python3
"""Benchmark the JIT kernels against the NumPy/Python fallback.

Runs the three hot loops (trajectory stepping, dense kernel tabulation,
streaming weighted kernel sums) in both dispatch modes and prints a
speedup table.  The numbers justify keeping numba on the default path:
the recurrences are sequential in n, so plain Python pays per-step
interpreter cost, while the dense-table fallback at least vectorizes
across columns.

Usage:
    python bench/bench_kernels.py [--size 800] [--repeat 5]
"""

import argparse
import time

import numpy as np

from delaystab import _kernels


def make_inputs(size, m=3, seed=0):
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-0.3, 0.3, (m, size))
    lags = rng.integers(0, 8, (m, size)).astype(np.int64)
    forcing = rng.uniform(-1, 1, size)
    weights = rng.uniform(-1, 1, size - 1)
    return coeffs, lags, forcing, weights


def time_call(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=800)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    size = args.size
    coeffs, lags, forcing, weights = make_inputs(size)
    steps = size
    T = int(lags.max())

    if not _kernels.NUMBA_ENABLED:
        print("numba is disabled (DELAYSTAB_NUMBA=0 or not installed); "
              "timing the fallback against itself is uninformative.")
        return

    _kernels.warmup()

    def x_buffer():
        x = np.zeros(T + steps + 1)
        x[T] = 1.0
        return x

    rows = []
    rows.append((
        f"step_recurrence (n={size})",
        time_call(_kernels.step_recurrence, coeffs, lags, forcing, x_buffer(), T, steps,
                  repeat=args.repeat),
        time_call(_kernels.py_step_recurrence, coeffs, lags, forcing, x_buffer(), T, steps,
                  repeat=args.repeat),
    ))
    rows.append((
        f"kernel_table ({size}x{size})",
        time_call(_kernels.kernel_table, coeffs, lags, size, repeat=args.repeat),
        time_call(_kernels.np_kernel_table, coeffs, lags, size, repeat=args.repeat),
    ))
    small = max(size // 4, 64)
    c2, l2, _, w2 = make_inputs(small)
    rows.append((
        f"weighted_kernel_sums (n={small})",
        time_call(_kernels.weighted_kernel_sums, c2, l2, w2, False, repeat=args.repeat),
        time_call(_kernels.py_weighted_kernel_sums, c2, l2, w2, False, repeat=args.repeat),
    ))

    # cross-check before reporting: both paths must agree exactly
    assert np.array_equal(_kernels.kernel_table(coeffs, lags, 64),
                          _kernels.np_kernel_table(coeffs, lags, 64))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'jit (s)':>10}  {'fallback (s)':>13}  {'speedup':>8}")
    for name, fast, slow in rows:
        print(f"{name:<{width}}  {fast:>10.5f}  {slow:>13.5f}  {slow / fast:>7.1f}x")


if __name__ == "__main__":
    main()
