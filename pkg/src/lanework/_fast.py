"""Compiled hot loops for the sparse kernels.

Every function here is jitted with ``nogil=True`` so lane shards really run
in parallel when the executor spreads them over worker threads; the pure
path in :mod:`lanework.kernels` is the drop-in fallback. Signatures take raw
arrays (CSR offsets/indices/values plus precomputed schedule state) because
that is all the compiled code can see.

Lane semantics match the pure executor exactly: thread-mapped lanes stride
tiles, merge-path lanes walk partition slices and report carries, group
members stride block atoms looked up against the offsets array.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def spmv_thread_mapped(offsets, col_indices, values, x, y, lane_begin, lane_step, lane_count):
    num_tiles = offsets.size - 1
    for lane in range(lane_begin, lane_count, lane_step):
        for tile in range(lane, num_tiles, lane_count):
            acc = 0.0
            for a in range(offsets[tile], offsets[tile + 1]):
                acc += values[a] * x[col_indices[a]]
            y[tile] = acc


@njit(**_JIT)
def spmv_merge_path(offsets, col_indices, values, x, y, coords,
                    carry_tile, carry_val, lane_begin, lane_step):
    lane_count = coords.shape[0] - 1
    for lane in range(lane_begin, lane_count, lane_step):
        atom = coords[lane, 1]
        atom_end = coords[lane + 1, 1]
        tile_end = coords[lane + 1, 0]
        acc = 0.0
        for tile in range(coords[lane, 0], tile_end):
            row_end = offsets[tile + 1]
            while atom < row_end:
                acc += values[atom] * x[col_indices[atom]]
                atom += 1
            y[tile] = acc
            acc = 0.0
        if atom < atom_end:
            while atom < atom_end:
                acc += values[atom] * x[col_indices[atom]]
                atom += 1
            carry_tile[lane] = tile_end
            carry_val[lane] = acc


@njit(**_JIT)
def spmv_group_mapped(offsets, col_indices, values, x, y, group_begin, group_step,
                      group_count, lane_count, group_size, tiles_per_block):
    num_tiles = offsets.size - 1
    blocks = (num_tiles + tiles_per_block - 1) // tiles_per_block
    for gid in range(group_begin, group_count, group_step):
        members = min(group_size, lane_count - gid * group_size)
        if members <= 0:
            continue
        for block in range(gid, blocks, group_count):
            tile_begin = block * tiles_per_block
            tile_count = min(tiles_per_block, num_tiles - tile_begin)
            base = offsets[tile_begin]
            total = offsets[tile_begin + tile_count] - base
            for m in range(members):
                tile = tile_begin
                for local in range(m, total, members):
                    atom = base + local
                    # resume the tile search from the member's last position;
                    # local atoms are visited in increasing order
                    while offsets[tile + 1] <= atom:
                        tile += 1
                    y[tile] += values[atom] * x[col_indices[atom]]


@njit(**_JIT)
def spmm_thread_mapped(offsets, col_indices, values, B, C, lane_begin, lane_step, lane_count):
    num_tiles = offsets.size - 1
    ncols = B.shape[1]
    for lane in range(lane_begin, lane_count, lane_step):
        for tile in range(lane, num_tiles, lane_count):
            for c in range(ncols):
                acc = 0.0
                for a in range(offsets[tile], offsets[tile + 1]):
                    acc += values[a] * B[col_indices[a], c]
                C[tile, c] = acc


@njit(**_JIT)
def spmm_merge_path(offsets, col_indices, values, B, C, coords,
                    carry_tile, carry_val, lane_begin, lane_step):
    lane_count = coords.shape[0] - 1
    ncols = B.shape[1]
    for lane in range(lane_begin, lane_count, lane_step):
        atom_begin = coords[lane, 1]
        atom_end = coords[lane + 1, 1]
        tile_end = coords[lane + 1, 0]
        atom = atom_begin
        for tile in range(coords[lane, 0], tile_end):
            row_end = offsets[tile + 1]
            for c in range(ncols):
                acc = 0.0
                for a in range(atom, row_end):
                    acc += values[a] * B[col_indices[a], c]
                C[tile, c] = acc
            atom = row_end
        if atom < atom_end:
            carry_tile[lane] = tile_end
            for c in range(ncols):
                acc = 0.0
                for a in range(atom, atom_end):
                    acc += values[a] * B[col_indices[a], c]
                carry_val[lane, c] = acc


@njit(**_JIT)
def spmm_group_mapped(offsets, col_indices, values, B, C, group_begin, group_step,
                      group_count, lane_count, group_size, tiles_per_block):
    num_tiles = offsets.size - 1
    ncols = B.shape[1]
    blocks = (num_tiles + tiles_per_block - 1) // tiles_per_block
    for gid in range(group_begin, group_count, group_step):
        members = min(group_size, lane_count - gid * group_size)
        if members <= 0:
            continue
        for block in range(gid, blocks, group_count):
            tile_begin = block * tiles_per_block
            tile_count = min(tiles_per_block, num_tiles - tile_begin)
            base = offsets[tile_begin]
            total = offsets[tile_begin + tile_count] - base
            for m in range(members):
                tile = tile_begin
                for local in range(m, total, members):
                    atom = base + local
                    while offsets[tile + 1] <= atom:
                        tile += 1
                    v = values[atom]
                    src = col_indices[atom]
                    for c in range(ncols):
                        C[tile, c] += v * B[src, c]


@njit(**_JIT)
def sssp_relax(active, offsets, col_indices, weights, dist, out_frontier):
    """Relax every out-edge of the active vertices; runs on one thread per
    pass, so plain loads and stores already behave atomically."""
    for i in range(active.size):
        u = active[i]
        du = dist[u]
        for e in range(offsets[u], offsets[u + 1]):
            v = col_indices[e]
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                out_frontier[v] = True


@njit(**_JIT)
def bfs_relax(active, offsets, col_indices, depth, next_depth, out_frontier):
    for i in range(active.size):
        u = active[i]
        for e in range(offsets[u], offsets[u + 1]):
            v = col_indices[e]
            if depth[v] < 0:
                depth[v] = next_depth
                out_frontier[v] = True


def warm_up():
    """Trigger compilation (or load the on-disk cache) for every kernel."""
    offsets = np.array([0, 2, 3], dtype=np.int64)
    cols = np.array([0, 1, 1], dtype=np.int64)
    vals = np.array([1.0, 2.0, 3.0])
    x = np.ones(2)
    y = np.zeros(2)
    coords = np.array([[0, 0], [2, 3]], dtype=np.int64)
    ct = np.full(1, -1, dtype=np.int64)
    cv = np.zeros(1)
    spmv_thread_mapped(offsets, cols, vals, x, y, 0, 1, 1)
    spmv_merge_path(offsets, cols, vals, x, y, coords, ct, cv, 0, 1)
    spmv_group_mapped(offsets, cols, vals, x, y, 0, 1, 1, 4, 4, 4)
    B = np.ones((2, 2))
    C = np.zeros((2, 2))
    cvm = np.zeros((1, 2))
    spmm_thread_mapped(offsets, cols, vals, B, C, 0, 1, 1)
    spmm_merge_path(offsets, cols, vals, B, C, coords, ct, cvm, 0, 1)
    spmm_group_mapped(offsets, cols, vals, B, C, 0, 1, 1, 4, 4, 4)
    active = np.array([0], dtype=np.int64)
    dist = np.array([0.0, np.inf])
    frontier = np.zeros(2, dtype=np.bool_)
    sssp_relax(active, offsets, cols, vals, dist, frontier)
    depth = np.array([0, -1], dtype=np.int64)
    bfs_relax(active, offsets, cols, depth, 1, frontier)
