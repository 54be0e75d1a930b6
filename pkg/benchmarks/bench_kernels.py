#!/usr/bin/env python3
"""Time the numba and numpy paths of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Outputs are also compared bitwise; a mismatch exits nonzero.
"""

import argparse
import sys
import time

import numpy as np

from divlab import kernels
from divlab.corpus import corpus_lookup
from divlab.divdiff import _derivative_table
from divlab.verify.sampling import sample_knots


def best_of(fn, repeat):
    fn()  # warmup, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def sweep_case(n, k):
    x = np.linspace(-1.0, 1.0, n + 1)
    samples = np.exp(x) * np.sin(5 * x)
    steps = np.arange(1, n // k + 1)
    return samples, k, steps


def table_cases(count, m):
    rng = np.random.default_rng(1)
    f = corpus_lookup("exp")
    out = []
    for _ in range(count):
        X = sample_knots(rng, m + 1, 2, 1e-3, "random")
        hi, lo = _derivative_table(X, f)
        out.append((X.expanded, hi, lo))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.numba is None:
        print("numba unavailable (or DIVLAB_DISABLE_NUMBA set); nothing to compare")
        return 0

    ok = True
    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for n, k in [(512, 2), (2048, 3), (4096, 4)]:
        samples, k, steps = sweep_case(n, k)
        a = kernels.difference_sweep(samples, k, steps, backend="numpy")
        b = kernels.difference_sweep(samples, k, steps, backend="numba")
        ok &= np.array_equal(a, b)
        tn = best_of(lambda: kernels.difference_sweep(samples, k, steps, backend="numpy"), args.repeat)
        tj = best_of(lambda: kernels.difference_sweep(samples, k, steps, backend="numba"), args.repeat)
        print(f"{f'difference_sweep n={n} k={k}':28s} {1e3 * tn:10.3f} {1e3 * tj:10.3f} {tn / tj:8.1f}")

    for m in (4, 8):
        cases = table_cases(200, m)

        def run(backend):
            return [kernels.dd_table(xs, hi, backend=backend, dvals_lo=lo) for xs, hi, lo in cases]

        ok &= all(np.array_equal(a, b) for a, b in zip(run("numpy"), run("numba")))
        tn = best_of(lambda: run("numpy"), args.repeat)
        tj = best_of(lambda: run("numba"), args.repeat)
        print(f"{f'dd_table m={m} x200':28s} {1e3 * tn:10.3f} {1e3 * tj:10.3f} {tn / tj:8.1f}")

    print("outputs bitwise equal" if ok else "OUTPUT MISMATCH between backends")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
