import heapq
from collections import deque

import numpy as np
import pytest

import lanework as lw


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile (or load the disk cache for) every jitted kernel up front so
    # individual tests measure logic, not compilation
    if lw.numba_active():
        from lanework import _fast

        _fast.warm_up()


def random_csr(rng, rows, cols, nnz, integer_values=False):
    m = lw.generate_random_csr(rows, cols, nnz, seed=int(rng.integers(1 << 30)))
    if integer_values:
        m.values = rng.integers(-4, 5, size=m.nnz).astype(np.float64)
    return m


def random_tile_set(rng, max_tiles=20, max_atoms=60):
    """Tile set with a healthy dose of empty tiles; may be entirely empty."""
    num_tiles = int(rng.integers(0, max_tiles + 1))
    counts = rng.integers(0, 7, size=num_tiles)
    counts[rng.random(num_tiles) < 0.3] = 0
    total = counts.sum()
    if total > max_atoms:
        counts = counts * max_atoms // max(total, 1)
    offsets = np.zeros(num_tiles + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return lw.TileSet(offsets)


def merge_walk_coords(offsets):
    """Brute-force merge simulation: walk the whole path once, consuming a
    tile boundary whenever offsets[tile+1] <= atom, else an atom, and record
    the coordinate at every step. coords[d] is the position on diagonal d."""
    num_tiles = len(offsets) - 1
    num_atoms = int(offsets[-1])
    coords = [(0, 0)]
    tile, atom = 0, 0
    for _ in range(num_tiles + num_atoms):
        if tile < num_tiles and offsets[tile + 1] <= atom:
            tile += 1
        else:
            atom += 1
        coords.append((tile, atom))
    return coords


def dijkstra_oracle(g, source):
    offsets, cols, weights = g.csr.row_offsets, g.csr.col_indices, g.csr.values
    dist = np.full(g.num_vertices, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for e in range(offsets[u], offsets[u + 1]):
            v = cols[e]
            if d + weights[e] < dist[v]:
                dist[v] = d + weights[e]
                heapq.heappush(heap, (dist[v], v))
    return dist


def bfs_oracle(g, source):
    offsets, cols = g.csr.row_offsets, g.csr.col_indices
    depth = np.full(g.num_vertices, -1, dtype=np.int64)
    depth[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for e in range(offsets[u], offsets[u + 1]):
            v = cols[e]
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                queue.append(v)
    return depth


def random_graph(rng, num_vertices, num_edges, integer_weights=False):
    m = random_csr(rng, num_vertices, num_vertices, num_edges)
    if integer_weights:
        m.values = rng.integers(0, 11, size=m.nnz).astype(np.float64)
    else:
        m.values = rng.uniform(0.0, 10.0, size=m.nnz)
    return lw.Graph(m)


def all_schedule_configs(lanes=8, worker_threads=1, group_sizes=(4,)):
    cfgs = [
        lw.ExecutorConfig(schedule=lw.ScheduleKind.THREAD_MAPPED, lanes=lanes,
                          worker_threads=worker_threads),
        lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=lanes,
                          worker_threads=worker_threads),
    ]
    for gs in group_sizes:
        cfgs.append(lw.ExecutorConfig(schedule=lw.ScheduleKind.GROUP_MAPPED, lanes=lanes,
                                      worker_threads=worker_threads, group_size=gs))
    return cfgs
