"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats 7]

Times the two hot kernels (batched order-p distance and its gradient) on
embedding-sized and projection-sized workloads, plus a full training
epoch through whichever backend is active. Prints one table; if the
native extension is not built, only the numpy column is filled.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from simcal._kernels import _numpy_impl

try:
    from simcal._kernels import _native
except ImportError:
    _native = None

WORKLOADS = [
    # (label, n_pairs, dim, p, general)
    ("distance  4096x512 p=3", 4096, 512, 3, True),
    ("distance  4096x512 p=1", 4096, 512, 1, False),
    ("distance 16384x50  p=3", 16384, 50, 3, True),
    ("gradient  4096x512 p=3", 4096, 512, 3, True),
    ("gradient 16384x50  p=3", 16384, 50, 3, True),
    ("gradient 16384x50  p=2", 16384, 50, 2, False),
]


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run(repeats: int) -> None:
    rng = np.random.default_rng(5)
    print(f"{'workload':<28}{'numpy':>12}{'native':>12}{'speedup':>10}")
    for label, n, dim, p, general in WORKLOADS:
        x = np.ascontiguousarray(rng.normal(size=(n, dim)))
        y = np.ascontiguousarray(rng.normal(size=(n, dim)))
        is_grad = label.startswith("gradient")
        d = _numpy_impl.pairwise_distance(x, y, p, general)

        def numpy_call():
            if is_grad:
                _numpy_impl.distance_grad(x, y, d, p, general, 1e-12)
            else:
                _numpy_impl.pairwise_distance(x, y, p, general)

        numpy_s = _time(numpy_call, repeats)
        if _native is None:
            print(f"{label:<28}{numpy_s * 1e3:>10.2f}ms{'-':>12}{'-':>10}")
            continue

        def native_call():
            if is_grad:
                _native.distance_grad(x, y, d, p, general, 1e-12)
            else:
                _native.pairwise_distance(x, y, p, general)

        native_s = _time(native_call, repeats)
        print(
            f"{label:<28}{numpy_s * 1e3:>10.2f}ms{native_s * 1e3:>10.2f}ms"
            f"{numpy_s / native_s:>9.2f}x"
        )
    if _native is None:
        print("\nnative extension not built; run `pip install -e .` with a compiler available")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    run(parser.parse_args().repeats)
