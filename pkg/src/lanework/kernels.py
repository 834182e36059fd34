"""Sparse kernels expressed over balanced schedules: SpMV, SpMM, SSSP, BFS.

Each kernel consumes whatever ranges the configured schedule hands its
lanes; the arithmetic itself is a few lines. Two implementations back every
kernel: compiled nogil loops (see :mod:`lanework._fast`) and a pure
NumPy/executor path, selected by :mod:`lanework._backend`. Both honor the
same assignment semantics, so integer-valued inputs produce bit-identical
results on either path under any schedule.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .executor import (
    SENTINEL_TILE,
    AtomicMinArray,
    ExecutorConfig,
    execute_merge_path,
    execute_tile_major,
    fixup_combine,
    group_shards,
    lane_shards,
    run_sharded,
)
from .schedules import ScheduleKind, exclusive_prefix_sum, merge_path_partition
from .sparse import CsrMatrix, Graph
from .work import TileSet, csr_tile_set

UNREACHED = -1

_fast_mod = None


def _fast():
    global _fast_mod
    if _fast_mod is None:
        from . import _fast as mod

        _fast_mod = mod
    return _fast_mod


@dataclass(frozen=True)
class HeuristicConfig:
    """Size thresholds for the SpMV schedule dispatcher."""

    alpha: int = 500
    beta: int = 10000

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


def spmv(m: CsrMatrix, x, cfg: ExecutorConfig | None = None) -> np.ndarray:
    """y = m @ x under the configured schedule; rows without nonzeros yield 0."""
    cfg = cfg or ExecutorConfig()
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != m.cols:
        raise ValueError(f"x has length {x.size}, expected {m.cols}")
    y = np.zeros(m.rows)
    ts = csr_tile_set(m)
    if _backend.numba_active():
        _spmv_fast(m, ts, x, y, cfg)
    else:
        _spmv_pure(m, ts, x, y, cfg)
    return y


def _spmv_fast(m, ts, x, y, cfg):
    fast = _fast()
    off, cols, vals = m.row_offsets, m.col_indices, m.values
    if cfg.schedule is ScheduleKind.THREAD_MAPPED:
        def run(shard):
            fast.spmv_thread_mapped(off, cols, vals, x, y, shard.start, shard.step, cfg.lanes)

        run_sharded(cfg.worker_threads, lane_shards(cfg), run)
    elif cfg.schedule is ScheduleKind.MERGE_PATH:
        coords = merge_path_partition(ts, cfg.lanes)
        carry_tile = np.full(cfg.lanes, SENTINEL_TILE, dtype=np.int64)
        carry_val = np.zeros(cfg.lanes)

        def run(shard):
            fast.spmv_merge_path(off, cols, vals, x, y, coords, carry_tile, carry_val,
                                 shard.start, shard.step)

        run_sharded(cfg.worker_threads, lane_shards(cfg), run)
        for lane in np.flatnonzero(carry_tile != SENTINEL_TILE):
            y[carry_tile[lane]] += carry_val[lane]
    else:
        def run(shard):
            fast.spmv_group_mapped(off, cols, vals, x, y, shard.start, shard.step,
                                   cfg.group_count, cfg.lanes, cfg.group_size,
                                   cfg.tiles_per_block)

        run_sharded(cfg.worker_threads, group_shards(cfg), run)


def _spmv_pure(m, ts, x, y, cfg):
    vals, cols = m.values, m.col_indices
    if cfg.schedule is ScheduleKind.THREAD_MAPPED:
        def row_dot(lane, tile, atoms):
            y[tile] = vals[atoms.start:atoms.stop] @ x[cols[atoms.start:atoms.stop]]

        execute_tile_major(cfg, ts, row_dot)
    elif cfg.schedule is ScheduleKind.MERGE_PATH:
        def atom_product(lane, tile, atom):
            return vals[atom] * x[cols[atom]]

        def tile_done(lane, tile, acc):
            y[tile] += acc

        carries = execute_merge_path(cfg, ts, atom_product, tile_done)

        def add_carry(tile, partial):
            y[tile] += partial

        fixup_combine(carries, add_carry)
    else:
        def one_atom(lane, tile, atoms):
            a = atoms.start
            y[tile] += vals[a] * x[cols[a]]

        execute_tile_major(cfg, ts, one_atom)


def spmm(m: CsrMatrix, B, cfg: ExecutorConfig | None = None) -> np.ndarray:
    """C = m @ B for a dense row-major B; the column loop wraps the SpMV body."""
    cfg = cfg or ExecutorConfig()
    B = np.ascontiguousarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != m.cols:
        raise ValueError(f"B has shape {B.shape}, expected ({m.cols}, k)")
    C = np.zeros((m.rows, B.shape[1]))
    ts = csr_tile_set(m)
    if _backend.numba_active():
        _spmm_fast(m, ts, B, C, cfg)
    else:
        _spmm_pure(m, ts, B, C, cfg)
    return C


def _spmm_fast(m, ts, B, C, cfg):
    fast = _fast()
    off, cols, vals = m.row_offsets, m.col_indices, m.values
    if cfg.schedule is ScheduleKind.THREAD_MAPPED:
        def run(shard):
            fast.spmm_thread_mapped(off, cols, vals, B, C, shard.start, shard.step, cfg.lanes)

        run_sharded(cfg.worker_threads, lane_shards(cfg), run)
    elif cfg.schedule is ScheduleKind.MERGE_PATH:
        coords = merge_path_partition(ts, cfg.lanes)
        carry_tile = np.full(cfg.lanes, SENTINEL_TILE, dtype=np.int64)
        carry_val = np.zeros((cfg.lanes, B.shape[1]))

        def run(shard):
            fast.spmm_merge_path(off, cols, vals, B, C, coords, carry_tile, carry_val,
                                 shard.start, shard.step)

        run_sharded(cfg.worker_threads, lane_shards(cfg), run)
        for lane in np.flatnonzero(carry_tile != SENTINEL_TILE):
            C[carry_tile[lane]] += carry_val[lane]
    else:
        def run(shard):
            fast.spmm_group_mapped(off, cols, vals, B, C, shard.start, shard.step,
                                   cfg.group_count, cfg.lanes, cfg.group_size,
                                   cfg.tiles_per_block)

        run_sharded(cfg.worker_threads, group_shards(cfg), run)


def _spmm_pure(m, ts, B, C, cfg):
    vals, cols = m.values, m.col_indices
    if cfg.schedule is ScheduleKind.THREAD_MAPPED:
        def row_dots(lane, tile, atoms):
            s, e = atoms.start, atoms.stop
            C[tile, :] = vals[s:e] @ B[cols[s:e], :]

        execute_tile_major(cfg, ts, row_dots)
    elif cfg.schedule is ScheduleKind.MERGE_PATH:
        # vector accumulations per tile portion; carries are rows of carry_val
        coords = merge_path_partition(ts, cfg.lanes)
        offsets = ts.offsets
        carry_tile = np.full(cfg.lanes, SENTINEL_TILE, dtype=np.int64)
        carry_val = np.zeros((cfg.lanes, B.shape[1]))

        def run(shard):
            for lane in shard:
                atom = int(coords[lane, 1])
                tile_end, atom_end = int(coords[lane + 1, 0]), int(coords[lane + 1, 1])
                for tile in range(int(coords[lane, 0]), tile_end):
                    row_end = int(offsets[tile + 1])
                    C[tile, :] = vals[atom:row_end] @ B[cols[atom:row_end], :]
                    atom = row_end
                if atom < atom_end:
                    carry_tile[lane] = tile_end
                    carry_val[lane] = vals[atom:atom_end] @ B[cols[atom:atom_end], :]

        run_sharded(cfg.worker_threads, lane_shards(cfg), run)
        for lane in np.flatnonzero(carry_tile != SENTINEL_TILE):
            C[carry_tile[lane]] += carry_val[lane]
    else:
        def one_atom(lane, tile, atoms):
            a = atoms.start
            C[tile, :] += vals[a] * B[cols[a], :]

        execute_tile_major(cfg, ts, one_atom)


def choose_spmv_schedule(rows: int, cols: int, nnz: int,
                         heuristic: HeuristicConfig | None = None,
                         small_schedule: ScheduleKind = ScheduleKind.THREAD_MAPPED) -> ScheduleKind:
    """Merge-path unless the matrix is small in one dimension AND in nnz."""
    heuristic = heuristic or HeuristicConfig()
    if (rows < heuristic.alpha or cols < heuristic.alpha) and nnz < heuristic.beta:
        return small_schedule
    return ScheduleKind.MERGE_PATH


def spmv_auto(m: CsrMatrix, x, heuristic: HeuristicConfig | None = None,
              cfg: ExecutorConfig | None = None,
              small_schedule: ScheduleKind = ScheduleKind.THREAD_MAPPED):
    """SpMV with the schedule picked by the size heuristic; returns (y, chosen)."""
    chosen = choose_spmv_schedule(m.rows, m.cols, m.nnz, heuristic, small_schedule)
    cfg = replace(cfg, schedule=chosen) if cfg is not None else ExecutorConfig(schedule=chosen)
    return spmv(m, x, cfg), chosen


@dataclass
class SsspState:
    """Distances plus the current and next frontier masks."""

    dist: np.ndarray
    in_frontier: np.ndarray
    out_frontier: np.ndarray


def sssp_init(num_vertices: int, source: int) -> SsspState:
    if not 0 <= source < num_vertices:
        raise ValueError(f"source {source} outside [0, {num_vertices})")
    dist = np.full(num_vertices, np.inf)
    dist[source] = 0.0
    in_frontier = np.zeros(num_vertices, dtype=bool)
    in_frontier[source] = True
    return SsspState(dist, in_frontier, np.zeros(num_vertices, dtype=bool))


def sssp_pass(g: Graph, state: SsspState, cfg: ExecutorConfig | None = None) -> int:
    """Relax every out-edge of the current frontier once.

    A vertex joins ``out_frontier`` only when its distance strictly
    improved, so repeated relaxation is idempotent and passes on a
    non-negative-weight graph number at most the vertex count. The caller
    owns the convergence loop (swap frontiers, repeat until empty).
    """
    cfg = cfg or ExecutorConfig()
    active = np.flatnonzero(state.in_frontier)
    out = np.zeros(g.num_vertices, dtype=bool)
    state.out_frontier = out
    if active.size == 0:
        return 0
    if _backend.numba_active():
        csr = g.csr
        _fast().sssp_relax(active, csr.row_offsets, csr.col_indices, csr.values,
                           state.dist, out)
    else:
        _sssp_pass_pure(g, active, state.dist, out, cfg)
    return int(np.count_nonzero(out))


def _frontier_tile_set(g, active):
    """Frontier vertices as tiles, their out-edges as atoms."""
    offsets = g.csr.row_offsets
    degrees = offsets[active + 1] - offsets[active]
    return TileSet(exclusive_prefix_sum(degrees))


def _sssp_pass_pure(g, active, dist, out_frontier, cfg):
    csr = g.csr
    row_offsets, cols, weights = csr.row_offsets, csr.col_indices, csr.values
    ts = _frontier_tile_set(g, active)
    ts_off = ts.offsets
    slots = AtomicMinArray(dist)  # shares dist's buffer

    def relax(lane, tile, atoms):
        u = active[tile]
        shift = row_offsets[u] - ts_off[tile]
        du = dist[u]
        for local in atoms:
            e = shift + local
            v = cols[e]
            nd = du + weights[e]
            if nd < slots.atomic_min(v, nd):
                out_frontier[v] = True

    if cfg.schedule is ScheduleKind.MERGE_PATH:
        _walk_merge_path_atoms(ts, cfg, relax)
    else:
        execute_tile_major(cfg, ts, relax)


def _walk_merge_path_atoms(ts, cfg, visit):
    """Hand each lane's merge-path slice to ``visit(lane, tile, atom_range)``
    one tile portion at a time; for side-effecting traversals (no reduction)."""
    coords = merge_path_partition(ts, cfg.lanes)
    offsets = ts.offsets

    def run(shard):
        for lane in shard:
            atom = int(coords[lane, 1])
            tile_end, atom_end = int(coords[lane + 1, 0]), int(coords[lane + 1, 1])
            for tile in range(int(coords[lane, 0]), tile_end):
                row_end = int(offsets[tile + 1])
                if atom < row_end:
                    visit(lane, tile, range(atom, row_end))
                    atom = row_end
            if atom < atom_end:
                visit(lane, tile_end, range(atom, atom_end))

    run_sharded(cfg.worker_threads, lane_shards(cfg), run)


def sssp(g: Graph, source: int, cfg: ExecutorConfig | None = None) -> np.ndarray:
    """Single-source shortest distances by frontier relaxation; unreached
    vertices keep +inf. Weights are non-negative by Graph construction."""
    state = sssp_init(g.num_vertices, source)
    while state.in_frontier.any():
        sssp_pass(g, state, cfg)
        state.in_frontier = state.out_frontier
    return state.dist


def bfs(g: Graph, source: int, cfg: ExecutorConfig | None = None) -> np.ndarray:
    """Hop counts from ``source`` over the same traversal as sssp with every
    edge weighing 1; unreached vertices get the UNREACHED sentinel."""
    cfg = cfg or ExecutorConfig()
    if not 0 <= source < g.num_vertices:
        raise ValueError(f"source {source} outside [0, {g.num_vertices})")
    depth = np.full(g.num_vertices, UNREACHED, dtype=np.int64)
    depth[source] = 0
    frontier = np.zeros(g.num_vertices, dtype=bool)
    frontier[source] = True
    level = 0
    csr = g.csr
    while True:
        active = np.flatnonzero(frontier)
        if active.size == 0:
            return depth
        out = np.zeros(g.num_vertices, dtype=bool)
        if _backend.numba_active():
            _fast().bfs_relax(active, csr.row_offsets, csr.col_indices, depth,
                              level + 1, out)
        else:
            _bfs_pass_pure(g, active, depth, level + 1, out, cfg)
        frontier = out
        level += 1


def _bfs_pass_pure(g, active, depth, next_depth, out_frontier, cfg):
    # level-synchronous: every writer stores the same depth, so claiming a
    # vertex is idempotent and needs no atomics
    csr = g.csr
    row_offsets, cols = csr.row_offsets, csr.col_indices
    ts = _frontier_tile_set(g, active)
    ts_off = ts.offsets

    def claim(lane, tile, atoms):
        u = active[tile]
        shift = row_offsets[u] - ts_off[tile]
        for local in atoms:
            v = cols[shift + local]
            if depth[v] < 0:
                depth[v] = next_depth
                out_frontier[v] = True

    if cfg.schedule is ScheduleKind.MERGE_PATH:
        _walk_merge_path_atoms(ts, cfg, claim)
    else:
        execute_tile_major(cfg, ts, claim)
