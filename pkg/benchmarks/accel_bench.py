"""Timing comparison of the compiled and pure-numpy kernel paths.

Runs the projection-correlation association accumulation and the
coordinate-descent solver on growing problem sizes through both
implementations and prints a speedup table.  The compiled path is skipped
when numba is unavailable or SMRMR_NO_NUMBA is set.

Usage: python3 benchmarks/accel_bench.py [--repeats N]
"""

import argparse
import time

import numpy as np

from smrmr._accel import NUMBA_ENABLED
from smrmr._kernels import (
    _cd_weighted_nn_numba,
    _cd_weighted_nn_numpy,
    _pc_association_numba,
    _pc_association_numpy,
)

ASSOC_SIZES = ((50, 5), (100, 10), (150, 20), (200, 30))
CD_SIZES = (20, 60, 120, 240)


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_association(repeats):
    rng = np.random.default_rng(0)
    print("\nprojection-correlation association accumulation")
    print(f"{'n':>6}{'m':>6}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    for n, m in ASSOC_SIZES:
        V = np.ascontiguousarray(rng.standard_normal((n, m)))
        t_np = _best_of(lambda: _pc_association_numpy(V), repeats)
        if NUMBA_ENABLED:
            _pc_association_numba(V)  # compile outside the timed region
            t_nb = _best_of(lambda: _pc_association_numba(V), repeats)
            check = np.max(np.abs(_pc_association_numba(V) - _pc_association_numpy(V)))
            assert check < 1e-9, f"paths disagree by {check}"
            print(f"{n:>6}{m:>6}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{n:>6}{m:>6}{t_np:>12.4f}{'-':>12}{'-':>10}")


def bench_coordinate_descent(repeats):
    rng = np.random.default_rng(1)
    print("\nnon-negative weighted-L1 coordinate descent")
    print(f"{'p':>6}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    for p in CD_SIZES:
        B = rng.standard_normal((p, p + 5))
        K = np.ascontiguousarray(B @ B.T / p + 1e-8 * np.eye(p))
        J = np.ascontiguousarray(rng.uniform(0, 1, p))
        w = np.ascontiguousarray(rng.uniform(0, 0.05, p))

        def run_numpy():
            _cd_weighted_nn_numpy(K, J, w, np.zeros(p), 10_000, 1e-9)

        def run_numba():
            _cd_weighted_nn_numba(K, J, w, np.zeros(p), 10_000, 1e-9)

        t_np = _best_of(run_numpy, repeats)
        if NUMBA_ENABLED:
            run_numba()
            t_nb = _best_of(run_numba, repeats)
            print(f"{p:>6}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{p:>6}{t_np:>12.4f}{'-':>12}{'-':>10}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    print(f"numba path enabled: {NUMBA_ENABLED}")
    bench_association(args.repeats)
    bench_coordinate_descent(args.repeats)


if __name__ == "__main__":
    main()
