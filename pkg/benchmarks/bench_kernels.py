"""Benchmark the compiled B-spline kernel against the pure-NumPy fallback.

Both backends implement the same contract (see sflr.kernels); this script
times them side by side on a range of basis sizes and point batches and
checks that they agree to machine precision.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""
import argparse
import time

import numpy as np

from sflr._pyboor import eval_basis_matrix as py_kernel
from sflr.basis import make_basis

try:
    from sflr._cyboor import eval_basis_matrix as cy_kernel
except ImportError:
    cy_kernel = None

CASES = [
    # (degree, intervals, n_points, deriv)
    (3, 30, 101, 0),
    (3, 30, 101, 2),
    (3, 30, 10_000, 0),
    (4, 70, 101, 0),
    (4, 70, 10_000, 0),
    (3, 100, 100_000, 0),
]


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per case (best is reported)")
    opts = parser.parse_args()

    if cy_kernel is None:
        print("compiled kernel unavailable; timing the fallback only\n")

    header = (f"{'degree':>6} {'M':>4} {'points':>8} {'deriv':>5} "
              f"{'python':>10} {'cython':>10} {'speedup':>8} {'max|diff|':>10}")
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(0)
    for degree, intervals, n_points, deriv in CASES:
        basis = make_basis(1.0, degree, intervals)
        pts = np.sort(rng.uniform(0.0, 1.0, n_points))
        args = (basis.knot_vector, degree, pts, deriv)
        t_py = _time(py_kernel, args, opts.repeats)
        if cy_kernel is None:
            print(f"{degree:>6} {intervals:>4} {n_points:>8} {deriv:>5} "
                  f"{t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8} {'-':>10}")
            continue
        t_cy = _time(cy_kernel, args, opts.repeats)
        diff = float(np.max(np.abs(py_kernel(*args) - cy_kernel(*args))))
        print(f"{degree:>6} {intervals:>4} {n_points:>8} {deriv:>5} "
              f"{t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms "
              f"{t_py / t_cy:>7.1f}x {diff:>10.2e}")


if __name__ == "__main__":
    main()
