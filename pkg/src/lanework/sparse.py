"""Sparse containers, format conversion, and synthetic matrix generators.

Dense vectors and dense matrices are plain numpy arrays (1-D and row-major
2-D ``float64``); only the sparse structures get their own classes. All
containers are immutable by convention once constructed and safe to share
across threads.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class CooMatrix:
    """Coordinate-format matrix; entries may be unsorted and may repeat."""

    rows: int
    cols: int
    row: np.ndarray
    col: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        self.row = np.asarray(self.row, dtype=np.int64)
        self.col = np.asarray(self.col, dtype=np.int64)
        self.data = np.asarray(self.data, dtype=np.float64)
        if not (self.row.shape == self.col.shape == self.data.shape):
            raise ValueError("row, col and data must have equal length")

    @property
    def nnz(self) -> int:
        return self.row.size

    def entries(self):
        """Iterate (row, col, value) tuples; mainly for small-matrix tests."""
        return zip(self.row.tolist(), self.col.tolist(), self.data.tolist())


@dataclass
class CsrMatrix:
    """Compressed sparse row storage.

    Invariants (see :func:`validate_csr`): ``row_offsets`` starts at 0, ends
    at nnz and is nondecreasing; column indices are strictly increasing
    within each row and below ``cols``.
    """

    rows: int
    cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.row_offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        self.col_indices = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)

    @property
    def nnz(self) -> int:
        return self.col_indices.size

    def row_lengths(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols))
        row_ids = np.repeat(np.arange(self.rows), self.row_lengths())
        dense[row_ids, self.col_indices] = self.values
        return dense


def validate_coo(m: CooMatrix) -> None:
    """Raise ValueError if any entry lies outside the declared shape."""
    if m.rows < 0 or m.cols < 0:
        raise ValueError("negative dimensions")
    if m.nnz and (
        m.row.min() < 0 or m.row.max() >= m.rows or m.col.min() < 0 or m.col.max() >= m.cols
    ):
        raise ValueError("entry index out of bounds")


def validate_csr(m: CsrMatrix) -> None:
    """Check every CSR invariant, raising ValueError on the first violation."""
    off = m.row_offsets
    if off.size != m.rows + 1:
        raise ValueError("row_offsets must have length rows+1")
    if off[0] != 0:
        raise ValueError("row_offsets[0] must be 0")
    if off[-1] != m.nnz:
        raise ValueError("row_offsets[-1] must equal nnz")
    if m.values.size != m.nnz:
        raise ValueError("values and col_indices must have equal length")
    if np.any(np.diff(off) < 0):
        raise ValueError("row_offsets must be nondecreasing")
    if m.nnz:
        if m.col_indices.min() < 0 or m.col_indices.max() >= m.cols:
            raise ValueError("column index out of bounds")
        row_ids = np.repeat(np.arange(m.rows), np.diff(off))
        same_row = row_ids[1:] == row_ids[:-1]
        if np.any(np.diff(m.col_indices)[same_row] <= 0):
            raise ValueError("column indices must be strictly increasing within a row")


class Graph:
    """A square CSR matrix read as adjacency: row = source vertex, nonzero =
    out-edge, column index = neighbor, value = edge weight.

    Negative weights are rejected here so shortest-path kernels can assume
    non-negativity.
    """

    def __init__(self, csr: CsrMatrix):
        if csr.rows != csr.cols:
            raise ValueError("adjacency matrix must be square")
        if csr.nnz and csr.values.min() < 0:
            raise ValueError("edge weights must be non-negative")
        self.csr = csr

    @property
    def num_vertices(self) -> int:
        return self.csr.rows

    @property
    def num_edges(self) -> int:
        return self.csr.nnz


def coo_to_csr(coo: CooMatrix) -> CsrMatrix:
    """Sort entries by (row, col), sum duplicates, and pack into CSR."""
    validate_coo(coo)
    order = np.lexsort((coo.col, coo.row))
    row = coo.row[order]
    col = coo.col[order]
    data = coo.data[order]
    if row.size:
        # collapse runs of identical (row, col) into one summed entry
        first = np.empty(row.size, dtype=bool)
        first[0] = True
        first[1:] = (row[1:] != row[:-1]) | (col[1:] != col[:-1])
        starts = np.flatnonzero(first)
        group = np.cumsum(first) - 1
        row = row[starts]
        col = col[starts]
        data = np.bincount(group, weights=data)
    counts = np.bincount(row, minlength=coo.rows)
    row_offsets = np.zeros(coo.rows + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    return CsrMatrix(coo.rows, coo.cols, row_offsets, col, data)


def csr_to_coo(m: CsrMatrix) -> CooMatrix:
    row = np.repeat(np.arange(m.rows), m.row_lengths())
    return CooMatrix(m.rows, m.cols, row, m.col_indices.copy(), m.values.copy())


def transpose_csr(m: CsrMatrix) -> CsrMatrix:
    """Transpose via COO; the load-time answer to column-compressed inputs."""
    coo = csr_to_coo(m)
    return coo_to_csr(CooMatrix(m.cols, m.rows, coo.col, coo.row, coo.data))


def generate_random_csr(rows: int, cols: int, nnz_target: int, seed: int) -> CsrMatrix:
    """Uniformly random matrix with exactly ``nnz_target`` distinct positions
    and values uniform in [-1, 1]; bit-reproducible for a fixed seed."""
    capacity = rows * cols
    if nnz_target > capacity:
        raise ValueError(f"nnz_target {nnz_target} exceeds capacity {capacity}")
    rng = np.random.default_rng(seed)
    if capacity <= 4 * nnz_target or capacity <= 1 << 22:
        positions = rng.choice(capacity, size=nnz_target, replace=False)
    else:
        # sparse occupancy: rejection sampling converges in a couple of rounds
        positions = np.empty(0, dtype=np.int64)
        while positions.size < nnz_target:
            draw = rng.integers(0, capacity, size=nnz_target + nnz_target // 4 + 16)
            positions = np.unique(np.concatenate([positions, draw]))
        positions = rng.permutation(positions)[:nnz_target]
    positions = np.sort(positions)
    values = rng.uniform(-1.0, 1.0, size=nnz_target)
    row = positions // cols if cols else positions
    col = positions % cols if cols else positions
    counts = np.bincount(row, minlength=rows)
    row_offsets = np.zeros(rows + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    return CsrMatrix(rows, cols, row_offsets, col, values)


def generate_power_law_csr(rows: int, avg_degree: float, skew: float, seed: int) -> CsrMatrix:
    """Square matrix whose row lengths follow a truncated Zipf law.

    Lengths are drawn by inverse-CDF sampling over the support [1, rows]
    with exponent ``skew``, then rescaled so the mean lands near
    ``avg_degree``. Low skew (near 1) produces the heavy-tailed row-length
    imbalance that stresses tile-per-lane scheduling.
    """
    if rows <= 0:
        raise ValueError("rows must be positive")
    if avg_degree <= 0:
        raise ValueError("avg_degree must be positive")
    if skew <= 0:
        raise ValueError("skew must be positive")
    rng = np.random.default_rng(seed)
    # inverse-CDF of the tail law P(Z >= k) = k**-skew, truncated to [1, rows]
    u = rng.random(rows)
    draws = np.minimum(np.floor(u ** (-1.0 / skew)), float(rows))
    scale = avg_degree / draws.mean()
    lengths = np.minimum(np.rint(draws * scale).astype(np.int64), rows)

    cols_per_row = []
    for k in lengths:
        if k <= 0:
            cols_per_row.append(np.empty(0, dtype=np.int64))
        else:
            # sampling with replacement then dedup; long rows shrink slightly
            cols_per_row.append(np.unique(rng.integers(0, rows, size=k)))
    actual = np.fromiter((c.size for c in cols_per_row), dtype=np.int64, count=rows)
    row_offsets = np.zeros(rows + 1, dtype=np.int64)
    np.cumsum(actual, out=row_offsets[1:])
    col_indices = np.concatenate(cols_per_row) if rows else np.empty(0, dtype=np.int64)
    values = rng.uniform(-1.0, 1.0, size=col_indices.size)
    return CsrMatrix(rows, rows, row_offsets, col_indices, values)
