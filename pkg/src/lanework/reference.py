"""Serial reference implementations the CLI validator compares against.

These deliberately avoid the schedule/executor machinery: dense matrix
products, binary-heap Dijkstra, and queue-based BFS.
"""

import heapq
from collections import deque

import numpy as np

from .sparse import CsrMatrix, Graph


def dense_spmv(m: CsrMatrix, x) -> np.ndarray:
    return m.to_dense() @ np.asarray(x, dtype=np.float64)


def dense_spmm(m: CsrMatrix, B) -> np.ndarray:
    return m.to_dense() @ np.asarray(B, dtype=np.float64)


def dijkstra(g: Graph, source: int) -> np.ndarray:
    offsets = g.csr.row_offsets
    cols = g.csr.col_indices
    weights = g.csr.values
    dist = np.full(g.num_vertices, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for e in range(offsets[u], offsets[u + 1]):
            v = cols[e]
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def serial_bfs(g: Graph, source: int, unreached: int = -1) -> np.ndarray:
    offsets = g.csr.row_offsets
    cols = g.csr.col_indices
    depth = np.full(g.num_vertices, unreached, dtype=np.int64)
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
