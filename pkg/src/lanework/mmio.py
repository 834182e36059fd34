"""Matrix Market coordinate-format reader and writer.

Supported inputs: banner ``%%MatrixMarket matrix coordinate <field> <symmetry>``
with field in {real, integer, pattern} and symmetry in {general, symmetric}.
Pattern entries get value 1.0; symmetric files expand off-diagonal entries to
both triangles. Indices are 1-based on disk and 0-based in memory.
"""

import io
from os import PathLike

import numpy as np

from .sparse import CooMatrix

_FIELDS = ("real", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric")


class MatrixMarketError(ValueError):
    """Raised for any malformed or unsupported Matrix Market input."""


def parse_matrix_market(source) -> CooMatrix:
    """Parse Matrix Market text (a string or a text file object) into a CooMatrix."""
    if isinstance(source, str):
        source = io.StringIO(source)

    banner = source.readline()
    if not banner:
        raise MatrixMarketError("empty input: missing Matrix Market banner")
    parts = banner.strip().split()
    if len(parts) != 5 or parts[0].lower() != "%%matrixmarket":
        raise MatrixMarketError(f"malformed banner: {banner.strip()!r}")
    obj, fmt, field, symmetry = (p.lower() for p in parts[1:])
    if obj != "matrix":
        raise MatrixMarketError(f"unsupported object {obj!r}: only 'matrix' is supported")
    if fmt != "coordinate":
        raise MatrixMarketError(f"unsupported format {fmt!r}: only 'coordinate' is supported")
    if field not in _FIELDS:
        raise MatrixMarketError(f"unsupported field {field!r}: expected one of {_FIELDS}")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(
            f"unsupported symmetry {symmetry!r}: expected one of {_SYMMETRIES}"
        )

    header = None
    for line in source:
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        header = stripped
        break
    if header is None:
        raise MatrixMarketError("missing size header line")
    tokens = header.split()
    if len(tokens) != 3:
        raise MatrixMarketError(f"malformed size header: {header!r}")
    try:
        rows, cols, declared = (int(t) for t in tokens)
    except ValueError:
        raise MatrixMarketError(f"malformed size header: {header!r}") from None
    if rows < 0 or cols < 0 or declared < 0:
        raise MatrixMarketError(f"negative dimension in size header: {header!r}")

    tokens_per_entry = 2 if field == "pattern" else 3
    ri = np.empty(declared, dtype=np.int64)
    ci = np.empty(declared, dtype=np.int64)
    vals = np.ones(declared, dtype=np.float64)
    count = 0
    for line in source:
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if count >= declared:
            raise MatrixMarketError(
                f"entry count mismatch: header declares {declared} entries but more follow"
            )
        fields = stripped.split()
        if len(fields) != tokens_per_entry:
            raise MatrixMarketError(f"malformed entry line: {stripped!r}")
        try:
            i = int(fields[0])
            j = int(fields[1])
            if tokens_per_entry == 3:
                vals[count] = float(fields[2])
        except ValueError:
            raise MatrixMarketError(f"malformed entry line: {stripped!r}") from None
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixMarketError(
                f"entry ({i}, {j}) out of declared bounds {rows} x {cols}"
            )
        ri[count] = i - 1
        ci[count] = j - 1
        count += 1
    if count != declared:
        raise MatrixMarketError(
            f"entry count mismatch: header declares {declared} entries, found {count}"
        )

    if symmetry == "symmetric":
        off_diag = ri != ci
        mirrored_r, mirrored_c = ci[off_diag], ri[off_diag]
        ri = np.concatenate([ri, mirrored_r])
        ci = np.concatenate([ci, mirrored_c])
        vals = np.concatenate([vals, vals[off_diag]])
    return CooMatrix(rows, cols, ri, ci, vals)


def load_matrix_market(path: str | PathLike) -> CooMatrix:
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        return parse_matrix_market(fh)


def write_matrix_market(coo: CooMatrix, field: str = "real") -> str:
    """Serialize a CooMatrix in coordinate/general form (1-based indices)."""
    if field not in ("real", "integer", "pattern"):
        raise ValueError(f"unsupported field {field!r}")
    out = [f"%%MatrixMarket matrix coordinate {field} general"]
    out.append(f"{coo.rows} {coo.cols} {coo.nnz}")
    if field == "pattern":
        for i, j, _ in coo.entries():
            out.append(f"{i + 1} {j + 1}")
    elif field == "integer":
        for i, j, v in coo.entries():
            out.append(f"{i + 1} {j + 1} {int(v)}")
    else:
        for i, j, v in coo.entries():
            out.append(f"{i + 1} {j + 1} {v!r}")
    return "\n".join(out) + "\n"
