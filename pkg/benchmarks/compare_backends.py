#!/usr/bin/env python3
"""Compare the compiled (numba) kernels against the pure NumPy fallback.

Times SpMV and SpMM under each schedule on a heavy-tailed power-law matrix
and prints a side-by-side table. The pure merge-path and group-mapped paths
pay per-atom Python dispatch, so expect large gaps there; that is the cost
the LANEWORK_BACKEND=numpy escape hatch accepts.

Usage: python benchmarks/compare_backends.py [--rows N] [--avg-degree D]
"""

import argparse
import time

import numpy as np

import lanework as lw


def median_ms(fn, reps):
    fn()  # warmup (includes JIT compilation on the numba path)
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=10_000)
    parser.add_argument("--avg-degree", type=float, default=32.0)
    parser.add_argument("--skew", type=float, default=1.1)
    parser.add_argument("--threads", type=int, default=8)
    parser.add_argument("--lanes", type=int, default=64)
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--spmm-cols", type=int, default=4)
    args = parser.parse_args()

    if not lw.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare against")

    m = lw.generate_power_law_csr(args.rows, args.avg_degree, args.skew, seed=1)
    x = np.ones(m.cols)
    B = np.ones((m.cols, args.spmm_cols))
    print(f"matrix: {m.rows} x {m.cols}, nnz={m.nnz} (power-law, skew={args.skew})")
    print(f"lanes={args.lanes} threads={args.threads} reps={args.reps} (median)\n")
    print(f"{'kernel':<8}{'schedule':<16}{'numba (ms)':>12}{'numpy (ms)':>12}{'speedup':>10}")

    runs = []
    for kind in lw.ScheduleKind:
        cfg = lw.ExecutorConfig(schedule=kind, lanes=args.lanes,
                                worker_threads=args.threads)
        runs.append(("spmv", kind, lambda cfg=cfg: lw.spmv(m, x, cfg)))
        runs.append(("spmm", kind, lambda cfg=cfg: lw.spmm(m, B, cfg)))

    for kernel, kind, fn in runs:
        with lw.use_backend("numba"):
            fast = median_ms(fn, args.reps)
        with lw.use_backend("numpy"):
            pure = median_ms(fn, args.reps)
        print(f"{kernel:<8}{kind.value:<16}{fast:>12.3f}{pure:>12.3f}{pure / fast:>9.1f}x")


if __name__ == "__main__":
    main()
