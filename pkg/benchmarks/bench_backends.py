#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the NumPy fallback.

Times the four hot kernels (float GEMM, integer GEMM, quantization
rounding, dense SVD) on both backends across a few sizes and prints a
table of medians. The float GEMM comparison is deliberately unfair to the
compiled core at large sizes: the fallback delegates to BLAS while the
core keeps sequential per-element accumulation for bitwise reproducibility.

Usage: python benchmarks/bench_backends.py [--sizes 64,128,256] [--repeat 5]
"""

import argparse
import statistics
import time

import numpy as np

from lramm import generate, UNIFORM01
from lramm._kernels import _pure

try:
    from lramm._kernels import _core
    from lramm._kernels._jacobi import jacobi_svd
except ImportError:
    _core = None


def timed(fn, *args, repeat=5):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench_size(n, repeat):
    a = generate(n, n, UNIFORM01, 1)
    b = generate(n, n, UNIFORM01, 2)
    rng = np.random.Generator(np.random.Philox(key=3))
    ia = rng.integers(-127, 128, size=(n, n)).astype(np.int32)
    ib = rng.integers(-127, 128, size=(n, n)).astype(np.int32)

    rows = []
    kernels = [
        ("gemm_f64", (a, b), "matmul"),
        ("gemm_i32", (ia, ib), "imatmul"),
        ("quantize", (a, 127.0, 127), "scale_round_clip"),
    ]
    for name, args, attr in kernels:
        t_pure = timed(getattr(_pure, attr), *args, repeat=repeat)
        t_core = timed(getattr(_core, attr), *args, repeat=repeat) if _core else float("nan")
        rows.append((name, n, t_core, t_pure))
    svd_repeat = max(1, repeat // 2)
    t_pure = timed(_pure.svd, a, repeat=svd_repeat)
    t_core = timed(jacobi_svd, a, repeat=svd_repeat) if _core else float("nan")
    rows.append(("svd", n, t_core, t_pure))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="64,128,256")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _core is None:
        print("compiled core not available; timing the fallback only\n")
    header = f"{'kernel':<10} {'n':>5} {'compiled':>12} {'python':>12} {'ratio c/p':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for name, size, t_core, t_pure in bench_size(n, args.repeat):
            ratio = t_core / t_pure if t_pure and t_core == t_core else float("nan")
            core_txt = f"{t_core * 1e3:10.3f} ms" if t_core == t_core else "      n/a"
            print(f"{name:<10} {size:>5} {core_txt:>12} {t_pure * 1e3:10.3f} ms {ratio:>10.2f}")


if __name__ == "__main__":
    main()
