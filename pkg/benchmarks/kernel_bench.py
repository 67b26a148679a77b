#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure numpy fallback.

Times the three hot kernels plus a full Lloyd run and one Big-means pass on
synthetic blob data, then prints per-backend timings and the speedup.

    python benchmarks/kernel_bench.py --m 200000 --n 16 --k 20
"""

import argparse
import time

import numpy as np

import samplemeans as sm
from samplemeans import backend
from samplemeans.bigmeans import Incumbent


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def build_cases(m, n, k, seed):
    X, _ = sm.synth_blobs(m, n, k, 1.0, seed)
    C = sm.kmeanspp_init(X, k, np.random.default_rng(seed))
    labels, _ = backend.assign_labels(X, C.centers)
    s = max(k, min(m, m // 10))

    def lloyd_case():
        sm.lloyd(X, C, sm.LloydConfig(max_iter=20, rel_tol=0.0))

    def step_case():
        sm.big_means_step(X, Incumbent(), s, k, sm.LloydConfig(),
                          np.random.default_rng(seed))

    return {
        "assign_labels": lambda: backend.assign_labels(X, C.centers),
        "label_sums": lambda: backend.label_sums(X, labels, k),
        "sqdist_to_point": lambda: backend.sqdist_to_point(X, C.centers[0]),
        "lloyd (20 iters)": lloyd_case,
        "big_means pass": step_case,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=200_000)
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--k", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    names = backend.available()
    if "numba" not in names:
        print("numba is not importable; nothing to compare")
        return
    print(f"m={args.m} n={args.n} k={args.k} repeat={args.repeat} (best-of timing)")

    results = {}
    for name in ("numpy", "numba"):
        backend.use(name)
        cases = build_cases(args.m, args.n, args.k, args.seed)
        for case_fn in cases.values():  # warmup / JIT compile
            case_fn()
        results[name] = {label: best_of(fn, args.repeat) for label, fn in cases.items()}
    backend.use("numba")

    header = f"{'kernel':<18}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label in results["numpy"]:
        t_np = results["numpy"][label]
        t_nb = results["numba"][label]
        print(f"{label:<18}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
