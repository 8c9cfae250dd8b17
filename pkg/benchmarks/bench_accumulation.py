#!/usr/bin/env python3
"""Benchmark the accumulation kernels: numba JIT versus pure numpy.

The resampled accumulation curve is the package's hot loop (replicates x
samples x taxa). Run with defaults, or scale the problem:

    python benchmarks/bench_accumulation.py --samples 400 --taxa 3000 --replicates 200
"""

import argparse
import time

import numpy as np

from tplec import _kernels


def build_problem(n_samples, n_taxa, replicates, density, seed=0):
    rng = np.random.default_rng(seed)
    counts = np.where(
        rng.random((n_samples, n_taxa)) < density,
        rng.integers(1, 50, size=(n_samples, n_taxa)),
        0,
    ).astype(np.int64)
    for i in range(n_samples):
        if counts[i].sum() == 0:
            counts[i, rng.integers(0, n_taxa)] = 1
    perms = np.stack(
        [np.random.default_rng(seed + 1 + r).permutation(n_samples) for r in range(replicates)]
    ).astype(np.int64)
    return counts, perms


def time_impl(impl, counts, perms, q, repeats):
    impl(counts, perms[: max(2, perms.shape[0] // 10)], q)  # warm up / JIT
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        impl(counts, perms, q)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=300)
    parser.add_argument("--taxa", type=int, default=2000)
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--density", type=float, default=0.08)
    parser.add_argument("--q", type=float, default=0.0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    counts, perms = build_problem(args.samples, args.taxa, args.replicates, args.density)
    print(
        f"problem: {args.samples} samples x {args.taxa} taxa, "
        f"{args.replicates} replicates, q={args.q}, "
        f"nnz={int((counts > 0).sum())}"
    )
    print(f"numba available: {_kernels.HAS_NUMBA}")

    t_numpy = time_impl(
        _kernels.accumulation_curves_numpy, counts, perms, args.q, args.repeats
    )
    print(f"numpy path: {t_numpy * 1000:9.2f} ms")

    if _kernels.HAS_NUMBA:
        t_numba = time_impl(
            _kernels.accumulation_curves_numba, counts, perms, args.q, args.repeats
        )
        print(f"numba path: {t_numba * 1000:9.2f} ms")
        print(f"speedup:    {t_numpy / t_numba:9.2f}x")
        a = _kernels.accumulation_curves_numba(counts, perms, args.q)
        b = _kernels.accumulation_curves_numpy(counts, perms, args.q)
        print(f"max |rel diff|: {np.max(np.abs(a - b) / np.maximum(np.abs(b), 1)):.3e}")
    else:
        print("numba path skipped (set TPLEC_DISABLE_NUMBA=0 or install numba)")


if __name__ == "__main__":
    main()
