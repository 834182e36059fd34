"""Schedules: pure partitioning functions from lane/group ids to work.

Three families are provided. Thread-mapped assigns whole tiles to lanes by
stride: trivial, but slow when tile sizes vary wildly. Merge-path walks the
staircase through (tile boundaries x atoms) and cuts it into equal-length
segments, so every lane gets the same number of work items no matter how
skewed the tiles are. Group-mapped assigns contiguous tile blocks to lane
groups; members split the block's atoms by stride using a prefix-sum plan
(fixed group sizes of 32 or 256 reproduce warp- and block-style schedules).
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .work import lane_stride_range, tile_offsets


class ScheduleKind(enum.Enum):
    THREAD_MAPPED = "thread-mapped"
    MERGE_PATH = "merge-path"
    GROUP_MAPPED = "group-mapped"


class MergePathCoord(NamedTuple):
    tile: int
    atom: int


class MergePathSlice(NamedTuple):
    tile_begin: int
    atom_begin: int
    tile_end: int
    atom_end: int

    @property
    def work_items(self) -> int:
        return (self.tile_end - self.tile_begin) + (self.atom_end - self.atom_begin)


@dataclass
class GroupPlan:
    """One tile block plus the exclusive prefix sum of its per-tile atom
    counts; ``prefix`` is what atom-to-tile lookups binary search."""

    tile_begin: int
    tile_count: int
    prefix: np.ndarray

    @property
    def total_atoms(self) -> int:
        return int(self.prefix[-1])


def thread_mapped_tiles(ts, lane: int, lane_count: int) -> range:
    """Tiles owned by ``lane`` under the thread-mapped schedule; each tile's
    atoms are its full contiguous range."""
    return lane_stride_range(lane, lane_count, ts.num_tiles)


def merge_path_search(diagonal: int, ts) -> MergePathCoord:
    """Locate the merge-path coordinate on ``diagonal``.

    The path starts at (0, 0) and, one step at a time, consumes a tile
    boundary whenever every atom of the current tile has been consumed
    (boundary before atom on ties, so empty tiles cost one step), otherwise
    an atom. The coordinate after ``diagonal`` steps is the unique
    (tile, atom) with tile + atom = diagonal found here by binary search.
    """
    num_tiles = ts.num_tiles
    num_atoms = ts.num_atoms
    if not 0 <= diagonal <= num_tiles + num_atoms:
        raise ValueError(f"diagonal {diagonal} outside [0, {num_tiles + num_atoms}]")
    offsets = tile_offsets(ts)
    lo = max(0, diagonal - num_atoms)
    hi = min(diagonal, num_tiles)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if offsets[mid] <= diagonal - mid:
            lo = mid
        else:
            hi = mid - 1
    return MergePathCoord(lo, diagonal - lo)


def merge_path_partition(ts, lane_count: int) -> np.ndarray:
    """Split points for ``lane_count`` lanes as an (lane_count+1, 2) array of
    (tile, atom) coordinates.

    Lane k owns the path segment between coordinates k and k+1; every lane
    gets ceil(total / lane_count) work items except the last (diagonals are
    clamped, so lane counts above the total leave trailing empty slices).
    """
    if lane_count < 1:
        raise ValueError("lane_count must be >= 1")
    offsets = tile_offsets(ts)
    num_tiles = ts.num_tiles
    total = num_tiles + ts.num_atoms
    items_per_lane = -(-total // lane_count) if total else 0
    diagonals = np.minimum(np.arange(lane_count + 1, dtype=np.int64) * items_per_lane, total)
    # offsets[t] + t is strictly increasing, so one searchsorted finds every
    # greatest tile with offsets[tile] <= diagonal - tile
    key = offsets + np.arange(num_tiles + 1, dtype=np.int64)
    tiles = np.searchsorted(key, diagonals, side="right") - 1
    coords = np.empty((lane_count + 1, 2), dtype=np.int64)
    coords[:, 0] = tiles
    coords[:, 1] = diagonals - tiles
    return coords


def merge_path_slices(ts, lane_count: int) -> list[MergePathSlice]:
    coords = merge_path_partition(ts, lane_count)
    return [
        MergePathSlice(coords[k, 0], coords[k, 1], coords[k + 1, 0], coords[k + 1, 1])
        for k in range(lane_count)
    ]


def exclusive_prefix_sum(xs) -> np.ndarray:
    """[x0, x1, ...] -> [0, x0, x0+x1, ...]; overflow raises instead of wrapping."""
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size and xs.min() < 0:
        raise ValueError("counts must be non-negative")
    out = np.zeros(xs.size + 1, dtype=np.int64)
    np.cumsum(xs, out=out[1:])
    if np.any(out[1:] < out[:-1]):
        raise OverflowError("prefix sum overflows 64-bit counts")
    return out


def num_blocks(ts, tiles_per_block: int) -> int:
    return -(-ts.num_tiles // tiles_per_block)


def group_plan(ts, group_id: int, group_count: int, tiles_per_block: int, block: int | None = None):
    """Plan for one tile block handled by ``group_id``.

    Blocks are contiguous tile ranges of ``tiles_per_block`` tiles (the last
    may be short) and are dealt to groups in group-stride order: block b
    belongs to group b mod group_count. ``block`` defaults to the group's
    first block; the executor passes each of the group's blocks explicitly.
    """
    if tiles_per_block < 1:
        raise ValueError("tiles_per_block must be >= 1")
    if not 0 <= group_id < group_count:
        raise ValueError("group_id must satisfy 0 <= group_id < group_count")
    if block is None:
        block = group_id
    elif block % group_count != group_id:
        raise ValueError(f"block {block} is not handled by group {group_id}")
    tile_begin = block * tiles_per_block
    if tile_begin >= ts.num_tiles and ts.num_tiles > 0:
        raise ValueError(f"block {block} is past the tile range")
    tile_count = min(tiles_per_block, ts.num_tiles - tile_begin)
    tile_count = max(tile_count, 0)
    counts = [ts.atoms_in_tile(tile_begin + i) for i in range(tile_count)]
    return GroupPlan(tile_begin, tile_count, exclusive_prefix_sum(counts))


def get_tile(plan: GroupPlan, local_atom: int) -> int:
    """Block-local tile owning ``local_atom``: the unique t with
    prefix[t] <= local_atom < prefix[t+1]. Empty tiles are never returned."""
    if not 0 <= local_atom < plan.total_atoms:
        raise ValueError(f"local_atom {local_atom} outside [0, {plan.total_atoms})")
    return int(np.searchsorted(plan.prefix, local_atom, side="right")) - 1
