"""Benchmark harness: load a matrix, run a kernel under a schedule, validate
against the serial reference, and emit CSV timing rows.

Single-matrix mode (-m) prints the verbose report block; sweep mode
(--sweep) walks a dataset directory of .mtx files and writes one CSV row per
(schedule, matrix). Exit codes: 0 success, 1 validation errors, 2 input
error.
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import reference
from .executor import ExecutorConfig, imbalance
from .kernels import HeuristicConfig, bfs, spmm, spmv, spmv_auto, sssp
from .mmio import MatrixMarketError, load_matrix_market
from .schedules import ScheduleKind
from .sparse import CsrMatrix, Graph, coo_to_csr
from .work import csr_tile_set

KERNELS = ("spmv", "spmm", "sssp", "bfs")
SCHEDULE_NAMES = ("merge-path", "thread-mapped", "group-mapped", "auto")
SPMM_COLUMNS = 8
SSSP_SOURCE = 0
REL_TOL = 1e-6


@dataclass
class BenchRecord:
    """One CSV row; the kernel column carries the schedule name."""

    kernel: str
    dataset: str
    rows: int
    cols: int
    nnzs: int
    elapsed: float

    def as_csv_row(self) -> str:
        return f"{self.kernel},{self.dataset},{self.rows},{self.cols},{self.nnzs},{self.elapsed:.6g}"


CSV_HEADER = "kernel,dataset,rows,cols,nnzs,elapsed"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lanework",
        description="Benchmark and validate load-balanced sparse kernels.",
    )
    p.add_argument("-m", "--matrix", help="path to a Matrix Market .mtx file")
    p.add_argument("--kernel", choices=KERNELS, default="spmv")
    p.add_argument("--schedule", default=None,
                   help="schedule name, or a comma-separated list for --sweep/--imbalance "
                        f"(choices: {', '.join(SCHEDULE_NAMES)})")
    p.add_argument("--lanes", type=int, default=None, help="virtual lane count (default threads*32)")
    p.add_argument("--group-size", type=int, default=32)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: cpu count)")
    p.add_argument("--validate", action="store_true",
                   help="compare against the serial reference and report an error count")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--sweep", metavar="DIR", help="run every .mtx under DIR and write CSV")
    p.add_argument("--limit", type=int, default=None, help="stop the sweep after N parsed matrices")
    p.add_argument("--out", default="results.csv", help="CSV output path for --sweep")
    p.add_argument("--reps", type=int, default=5, help="timed repetitions (median reported)")
    p.add_argument("--seed", type=int, default=42, help="seed for validation inputs")
    p.add_argument("--alpha", type=int, default=500, help="auto-schedule row/col threshold")
    p.add_argument("--beta", type=int, default=10000, help="auto-schedule nnz threshold")
    p.add_argument("--imbalance", action="store_true",
                   help="print per-schedule imbalance factors instead of running a kernel")
    return p


def _parse_schedules(arg, default):
    if arg is None:
        names = list(default)
    else:
        names = [s.strip() for s in arg.split(",") if s.strip()]
    for name in names:
        if name not in SCHEDULE_NAMES:
            raise ValueError(f"unknown schedule {name!r}; expected one of {SCHEDULE_NAMES}")
    return names


def _make_config(args, schedule: ScheduleKind) -> ExecutorConfig:
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    return ExecutorConfig(schedule=schedule, lanes=args.lanes,
                          worker_threads=threads, group_size=args.group_size)


def _load_csr(path) -> CsrMatrix:
    return coo_to_csr(load_matrix_market(path))


def _kernel_runner(kernel: str, schedule_name: str, csr: CsrMatrix, args, validate: bool):
    """Build the zero-argument timed callable for one kernel/schedule pair."""
    rng = np.random.default_rng(args.seed)
    heur = HeuristicConfig(alpha=args.alpha, beta=args.beta)
    if kernel in ("sssp", "bfs"):
        graph = Graph(csr)  # raises on non-square or negative weights

    if schedule_name == "auto":
        if kernel != "spmv":
            raise ValueError("the auto schedule is only defined for spmv")
        cfg = _make_config(args, ScheduleKind.MERGE_PATH)
        x = rng.random(csr.cols) if validate else np.ones(csr.cols)
        return lambda: spmv_auto(csr, x, heur, cfg)[0], lambda y: _count_errors(y, reference.dense_spmv(csr, x))

    cfg = _make_config(args, ScheduleKind(schedule_name))
    if kernel == "spmv":
        x = rng.random(csr.cols) if validate else np.ones(csr.cols)
        return lambda: spmv(csr, x, cfg), lambda y: _count_errors(y, reference.dense_spmv(csr, x))
    if kernel == "spmm":
        B = rng.random((csr.cols, SPMM_COLUMNS)) if validate else np.ones((csr.cols, SPMM_COLUMNS))
        return lambda: spmm(csr, B, cfg), lambda C: _count_errors(C, reference.dense_spmm(csr, B))
    if kernel == "sssp":
        return (lambda: sssp(graph, SSSP_SOURCE, cfg),
                lambda d: _count_errors(d, reference.dijkstra(graph, SSSP_SOURCE), rel_tol=1e-9))
    return (lambda: bfs(graph, SSSP_SOURCE, cfg),
            lambda d: int(np.count_nonzero(d != reference.serial_bfs(graph, SSSP_SOURCE))))


def _count_errors(got, want, rel_tol: float = REL_TOL) -> int:
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    both_inf = np.isinf(got) & np.isinf(want)
    bad = np.abs(got - want) > rel_tol * np.maximum(1.0, np.abs(want))
    return int(np.count_nonzero(bad & ~both_inf))


def _timed_median(fn, reps: int):
    fn()  # warmup; also triggers JIT compilation
    times = []
    result = None
    for _ in range(max(1, reps)):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return float(np.median(times)), result


def run_single(args) -> int:
    schedules = _parse_schedules(args.schedule, default=["merge-path"])
    if len(schedules) != 1:
        print("error: single-matrix mode takes exactly one schedule", file=sys.stderr)
        return 2
    csr = _load_csr(args.matrix)
    runner, checker = _kernel_runner(args.kernel, schedules[0], csr, args, args.validate)
    elapsed_ms, result = _timed_median(runner, args.reps)
    errors = checker(result) if args.validate else None
    if args.verbose:
        print(f"{'Elapsed (ms):':<16}{elapsed_ms:.6f}")
        print(f"{'Matrix:':<16}{Path(args.matrix).name}")
        print(f"{'Dimensions:':<16}{csr.rows} x {csr.cols} ({csr.nnz})")
        if errors is not None:
            print(f"{'Errors:':<16}{errors}")
    elif errors is not None:
        print(f"{'Errors:':<16}{errors}")
    return 1 if errors else 0


def run_sweep(args) -> int:
    root = Path(args.sweep)
    if not root.is_dir():
        print(f"error: dataset directory {root} does not exist", file=sys.stderr)
        return 2
    schedules = _parse_schedules(args.schedule, default=["merge-path"])
    matrices = []
    for path in sorted(root.rglob("*.mtx")):
        try:
            matrices.append((path.stem, _load_csr(path)))
        except (MatrixMarketError, OSError, ValueError) as exc:
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
            continue
        if args.limit is not None and len(matrices) >= args.limit:
            break
    if not matrices:
        print(f"error: no usable .mtx files under {root}", file=sys.stderr)
        return 2

    records = []
    for schedule_name in schedules:
        for stem, csr in matrices:
            try:
                runner, _ = _kernel_runner(args.kernel, schedule_name, csr, args, validate=False)
                elapsed_ms, _ = _timed_median(runner, args.reps)
            except ValueError as exc:
                print(f"warning: skipping {stem} under {schedule_name}: {exc}", file=sys.stderr)
                continue
            records.append(BenchRecord(schedule_name, stem, csr.rows, csr.cols, csr.nnz, elapsed_ms))

    out = Path(args.out)
    with out.open("w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for record in records:
            fh.write(record.as_csv_row() + "\n")
    if args.verbose:
        print(f"wrote {len(records)} rows to {out}")
    return 0


def report_imbalance(args) -> int:
    schedules = _parse_schedules(
        args.schedule, default=["thread-mapped", "merge-path", "group-mapped"]
    )
    if "auto" in schedules:
        print("error: --imbalance expects concrete schedules, not auto", file=sys.stderr)
        return 2
    csr = _load_csr(args.matrix)
    ts = csr_tile_set(csr)
    print(f"{'schedule':<16}{'lanes':>8}{'max':>12}{'mean':>14}{'imbalance':>12}")
    for name in schedules:
        cfg = _make_config(args, ScheduleKind(name))
        report = imbalance(ts, cfg)
        print(f"{name:<16}{cfg.lanes:>8}{report.max:>12}{report.mean:>14.2f}"
              f"{report.imbalance_factor:>12.3f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.sweep:
            return run_sweep(args)
        if not args.matrix:
            print("error: provide -m/--matrix or --sweep", file=sys.stderr)
            return 2
        if args.imbalance:
            return report_imbalance(args)
        return run_single(args)
    except (MatrixMarketError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
