"""Runs a schedule over a tile set on P virtual lanes mapped to worker threads.

Lanes are decoupled from OS threads: lane ids are sharded round-robin over
``worker_threads`` (mirroring oversubscription on wide hardware), so results
never depend on the thread count. Groups are always co-located on one thread
and simulated phase by phase (plan build, then member-stride execution),
which removes any need for intra-group barriers.

``execute_*`` spawns its workers and joins them before returning; nothing
survives the call. Work functions run concurrently, so their writes must
target lane- or tile-disjoint state, or go through :class:`AtomicMinArray`
or the merge-path carry/fixup pathway.
"""

import operator
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .schedules import (
    ScheduleKind,
    get_tile,
    group_plan,
    merge_path_partition,
    num_blocks,
)
from .work import tile_offsets

SENTINEL_TILE = -1


@dataclass
class ExecutorConfig:
    """Lane count P, thread count, and the schedule that maps lanes to work.

    ``lanes`` defaults to ``worker_threads * 32`` (oversubscription);
    ``tiles_per_block`` defaults to ``group_size`` so each group member gets
    one tile's worth of block by default. ``group_size`` and
    ``tiles_per_block`` only matter for the group-mapped schedule.
    """

    schedule: ScheduleKind = ScheduleKind.MERGE_PATH
    lanes: int | None = None
    worker_threads: int = 1
    group_size: int = 32
    tiles_per_block: int | None = None

    def __post_init__(self):
        if self.worker_threads < 1:
            raise ValueError("worker_threads must be >= 1")
        if self.lanes is None:
            self.lanes = self.worker_threads * 32
        if self.lanes < 1:
            raise ValueError("lanes must be >= 1")
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if self.tiles_per_block is None:
            self.tiles_per_block = self.group_size
        if self.tiles_per_block < 1:
            raise ValueError("tiles_per_block must be >= 1")

    def group_lanes(self, group_id: int) -> range:
        """Lanes belonging to ``group_id``; the last group may be short."""
        lo = group_id * self.group_size
        return range(lo, min(lo + self.group_size, self.lanes))

    @property
    def group_count(self) -> int:
        return -(-self.lanes // self.group_size)


class CarryOut(NamedTuple):
    """A lane's reduction of its final, right-open tile. Lanes whose slice
    ends exactly on a tile boundary report the sentinel instead."""

    tile: int
    partial: float


@dataclass(frozen=True)
class CarryPolicy:
    """How merge-path accumulations start and combine; addition by default."""

    identity: float = 0.0
    combine: Callable = operator.add


SUM_CARRIES = CarryPolicy()


@dataclass
class ImbalanceReport:
    per_lane_atoms: np.ndarray
    max: int = field(init=False)
    mean: float = field(init=False)
    imbalance_factor: float = field(init=False)

    def __post_init__(self):
        self.max = int(self.per_lane_atoms.max()) if self.per_lane_atoms.size else 0
        self.mean = float(self.per_lane_atoms.mean()) if self.per_lane_atoms.size else 0.0
        self.imbalance_factor = self.max / self.mean if self.mean > 0 else 1.0


def run_sharded(worker_threads: int, shards, run: Callable) -> None:
    """Run ``run(shard)`` for each shard, on up to ``worker_threads`` threads.

    A single thread (or single shard) runs inline; otherwise a pool is
    spawned and joined here, and the first worker exception is re-raised.
    """
    shards = [s for s in shards if len(s)]
    if worker_threads <= 1 or len(shards) <= 1:
        for shard in shards:
            run(shard)
        return
    with ThreadPoolExecutor(max_workers=worker_threads) as pool:
        futures = [pool.submit(run, shard) for shard in shards]
        for f in futures:
            f.result()


def lane_shards(cfg: ExecutorConfig) -> list[range]:
    return [range(j, cfg.lanes, cfg.worker_threads) for j in range(cfg.worker_threads)]


def group_shards(cfg: ExecutorConfig) -> list[range]:
    return [range(j, cfg.group_count, cfg.worker_threads) for j in range(cfg.worker_threads)]


def execute_tile_major(cfg: ExecutorConfig, ts, work_fn) -> None:
    """Invoke ``work_fn(lane, tile, atom_range)`` over the whole tile set.

    Thread-mapped lanes receive each owned tile once with its full atom
    range. Group-mapped members receive block atoms by member stride, one
    atom at a time, attributed to the tile the block plan looks up.
    """
    if cfg.schedule is ScheduleKind.THREAD_MAPPED:
        offsets = tile_offsets(ts)
        num_tiles = ts.num_tiles

        def run(shard):
            for lane in shard:
                for tile in range(lane, num_tiles, cfg.lanes):
                    work_fn(lane, tile, range(offsets[tile], offsets[tile + 1]))

        run_sharded(cfg.worker_threads, lane_shards(cfg), run)
    elif cfg.schedule is ScheduleKind.GROUP_MAPPED:
        blocks = num_blocks(ts, cfg.tiles_per_block)
        group_count = cfg.group_count

        def run(shard):
            for gid in shard:
                members = cfg.group_lanes(gid)
                stride = len(members)
                if stride == 0:
                    continue
                for block in range(gid, blocks, group_count):
                    plan = group_plan(ts, gid, group_count, cfg.tiles_per_block, block)
                    base = ts.atom_offset(plan.tile_begin)
                    total = plan.total_atoms
                    for m, lane in enumerate(members):
                        for local in range(m, total, stride):
                            tile = plan.tile_begin + get_tile(plan, local)
                            work_fn(lane, tile, range(base + local, base + local + 1))

        run_sharded(cfg.worker_threads, group_shards(cfg), run)
    else:
        raise ValueError(f"execute_tile_major does not accept {cfg.schedule}")


def execute_merge_path(cfg: ExecutorConfig, ts, atom_fn, tile_done,
                       carry_policy: CarryPolicy = SUM_CARRIES) -> list[CarryOut]:
    """Walk each lane's merge-path slice in path order.

    ``atom_fn(lane, tile, atom)`` produces a value per atom; accumulations
    reset at tile boundaries. ``tile_done(lane, tile, acc)`` fires for every
    tile whose right edge lies inside the slice. The final, right-open
    tile's accumulation comes back as the lane's CarryOut; boundary-aligned
    slices yield the sentinel. Feed the result to :func:`fixup_combine`.
    """
    if cfg.schedule is not ScheduleKind.MERGE_PATH:
        raise ValueError(f"execute_merge_path requires the merge-path schedule, got {cfg.schedule}")
    offsets = tile_offsets(ts)
    coords = merge_path_partition(ts, cfg.lanes)
    identity, combine = carry_policy.identity, carry_policy.combine
    carries = [CarryOut(SENTINEL_TILE, identity)] * cfg.lanes

    def run(shard):
        for lane in shard:
            tile_begin, atom = int(coords[lane, 0]), int(coords[lane, 1])
            tile_end, atom_end = int(coords[lane + 1, 0]), int(coords[lane + 1, 1])
            acc = identity
            for tile in range(tile_begin, tile_end):
                row_end = offsets[tile + 1]
                while atom < row_end:
                    acc = combine(acc, atom_fn(lane, tile, atom))
                    atom += 1
                tile_done(lane, tile, acc)
                acc = identity
            if atom < atom_end:
                while atom < atom_end:
                    acc = combine(acc, atom_fn(lane, tile_end, atom))
                    atom += 1
                carries[lane] = CarryOut(int(tile_end), acc)

    run_sharded(cfg.worker_threads, lane_shards(cfg), run)
    return carries


def fixup_combine(carries, combine) -> None:
    """Apply every non-sentinel carry exactly once, in lane order.

    ``combine(tile, partial)`` must be associative-commutative in effect on
    each tile's output slot; afterwards per-tile results equal the serial
    per-tile reduction.
    """
    for carry in carries:
        if carry.tile != SENTINEL_TILE:
            combine(carry.tile, carry.partial)


def imbalance(ts, cfg: ExecutorConfig) -> ImbalanceReport:
    """Atoms each lane would process under ``cfg``, without running a kernel."""
    counts = np.asarray(ts.atoms_per_tile())
    per_lane = np.zeros(cfg.lanes, dtype=np.int64)
    if cfg.schedule is ScheduleKind.THREAD_MAPPED:
        for lane in range(min(cfg.lanes, max(ts.num_tiles, 0))):
            per_lane[lane] = counts[lane::cfg.lanes].sum()
    elif cfg.schedule is ScheduleKind.MERGE_PATH:
        coords = merge_path_partition(ts, cfg.lanes)
        per_lane[:] = coords[1:, 1] - coords[:-1, 1]
    elif cfg.schedule is ScheduleKind.GROUP_MAPPED:
        offsets = tile_offsets(ts)
        blocks = num_blocks(ts, cfg.tiles_per_block)
        for gid in range(cfg.group_count):
            members = cfg.group_lanes(gid)
            stride = len(members)
            if stride == 0:
                continue
            for block in range(gid, blocks, cfg.group_count):
                tile_begin = block * cfg.tiles_per_block
                tile_count = min(cfg.tiles_per_block, ts.num_tiles - tile_begin)
                total = int(offsets[tile_begin + tile_count] - offsets[tile_begin])
                for m, lane in enumerate(members):
                    if total > m:
                        per_lane[lane] += -(-(total - m) // stride)
    else:
        raise ValueError(f"unknown schedule {cfg.schedule}")
    return ImbalanceReport(per_lane)


class AtomicMinArray:
    """Shared array of non-negative reals (or +inf) supporting atomic min.

    The non-negativity requirement keeps the update's ordering identical to
    the order-preserving bit-pattern comparison hardware atomics rely on;
    mixed signs would invalidate it, so negative candidates are rejected.
    CPython has no user-space compare-and-swap, so a lock provides the
    atomicity here.
    """

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=np.float64)
        if self.values.size and np.nanmin(self.values) < 0:
            raise ValueError("slots must hold non-negative reals or +inf")
        self._lock = threading.Lock()

    def atomic_min(self, index: int, candidate: float) -> float:
        """Set slot ``index`` to min(slot, candidate); returns the prior value."""
        if not candidate >= 0:
            raise ValueError("candidate must be non-negative")
        with self._lock:
            previous = float(self.values[index])
            if candidate < previous:
                self.values[index] = candidate
            return previous


def atomic_min_real(slots: AtomicMinArray, index: int, candidate: float) -> float:
    """Function-call spelling of :meth:`AtomicMinArray.atomic_min`."""
    return slots.atomic_min(index, candidate)
