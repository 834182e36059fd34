"""The work domain: atoms, tiles, tile sets, and the ranges lanes iterate.

An *atom* is the smallest schedulable unit (one nonzero, one edge); a *tile*
is a group of atoms (one row, one vertex's edge list); a *tile set* is the
whole problem. Schedules only ever see this vocabulary, so anything that can
describe itself as tiles-with-atom-offsets can be load balanced.
"""

import itertools

import numpy as np

from .sparse import CsrMatrix


class TileSet:
    """Tiles with contiguous atom ranges, described by an offsets array.

    ``offsets`` has ``num_tiles + 1`` entries; tile ``t`` owns atoms
    ``[offsets[t], offsets[t+1])``. Tiles are independent of each other, and
    accessors are safe for concurrent reads.

    Schedules only consume ``num_tiles``, ``num_atoms`` and ``atom_offset``,
    so duck-typed tile sets backed by something other than an array also
    work on the pure path; this concrete class is what the compiled kernels
    accept.
    """

    __slots__ = ("offsets",)

    def __init__(self, offsets):
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        if offsets.ndim != 1 or offsets.size < 1:
            raise ValueError("offsets must be a 1-D array of length num_tiles+1")
        if offsets[0] != 0:
            raise ValueError("offsets must start at 0")
        if np.any(np.diff(offsets) < 0):
            raise ValueError("offsets must be nondecreasing")
        self.offsets = offsets

    @property
    def num_tiles(self) -> int:
        return self.offsets.size - 1

    @property
    def num_atoms(self) -> int:
        return int(self.offsets[-1])

    def atom_offset(self, tile: int) -> int:
        """Index of the first atom of ``tile``; defined for 0 <= tile <= num_tiles."""
        return int(self.offsets[tile])

    def atoms_in_tile(self, tile: int) -> int:
        return int(self.offsets[tile + 1] - self.offsets[tile])

    def atoms_per_tile(self) -> np.ndarray:
        return np.diff(self.offsets)

    def __repr__(self):
        return f"TileSet(num_tiles={self.num_tiles}, num_atoms={self.num_atoms})"


def csr_tile_set(m: CsrMatrix) -> TileSet:
    """View a CSR matrix as a tile set: rows are tiles, nonzeros are atoms."""
    return TileSet(m.row_offsets)


def tile_offsets(ts) -> np.ndarray:
    """Materialize a tile set's offsets array (shared, not copied, when backed
    by one already)."""
    offsets = getattr(ts, "offsets", None)
    if offsets is not None:
        return offsets
    n = ts.num_tiles
    return np.fromiter((ts.atom_offset(t) for t in range(n + 1)), dtype=np.int64, count=n + 1)


def step_range(begin: int, end: int, step: int) -> range:
    """begin, begin+step, ... strictly below end; empty when begin >= end."""
    if step < 1:
        raise ValueError("step must be >= 1")
    return range(begin, end, step)


def lane_stride_range(lane: int, lane_count: int, domain_end: int) -> range:
    """The slice of [0, domain_end) owned by ``lane`` when ``lane_count``
    lanes stride the domain together; the union over lanes is a partition."""
    if lane_count < 1:
        raise ValueError("lane_count must be >= 1")
    if not 0 <= lane < lane_count:
        raise ValueError("lane must satisfy 0 <= lane < lane_count")
    return range(lane, domain_end, lane_count)


def infinite_range(begin: int):
    """begin, begin+1, ... without end; the consumer owns termination."""
    return itertools.count(begin)
