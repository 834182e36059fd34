import io

import numpy as np
import pytest
import scipy.io

import lanework as lw
from lanework.mmio import MatrixMarketError


def entries_set(coo):
    return set(coo.entries())


def test_general_real_basic():
    text = "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 5.0\n3 2 7.0\n"
    coo = lw.parse_matrix_market(text)
    assert (coo.rows, coo.cols) == (3, 3)
    assert entries_set(coo) == {(0, 0, 5.0), (2, 1, 7.0)}


def test_symmetric_expansion():
    text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 4.0\n"
    coo = lw.parse_matrix_market(text)
    assert entries_set(coo) == {(1, 0, 4.0), (0, 1, 4.0)}


def test_symmetric_diagonal_not_duplicated():
    text = (
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "3 3 3\n1 1 1.0\n2 1 2.0\n3 3 3.0\n"
    )
    coo = lw.parse_matrix_market(text)
    # k off-diagonal + d diagonal entries yield 2k + d
    assert coo.nnz == 2 * 1 + 2


def test_pattern_entries_get_unit_value():
    text = "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 2\n2 3\n"
    coo = lw.parse_matrix_market(text)
    assert entries_set(coo) == {(0, 1, 1.0), (1, 2, 1.0)}


def test_integer_field_and_comments():
    text = (
        "%%MatrixMarket matrix coordinate integer general\n"
        "% a comment\n\n2 2 2\n% another\n1 1 3\n2 2 -4\n"
    )
    coo = lw.parse_matrix_market(text)
    assert entries_set(coo) == {(0, 0, 3.0), (1, 1, -4.0)}


def test_accepts_file_objects():
    text = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2.5\n"
    coo = lw.parse_matrix_market(io.StringIO(text))
    assert coo.nnz == 1


@pytest.mark.parametrize(
    "text,match",
    [
        ("", "banner"),
        ("%%NotMatrixMarket matrix coordinate real general\n1 1 0\n", "banner"),
        ("%%MatrixMarket matrix coordinate real\n1 1 0\n", "banner"),
        ("%%MatrixMarket tensor coordinate real general\n1 1 0\n", "object"),
        ("%%MatrixMarket matrix array real general\n1 1\n", "format"),
        ("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n", "field"),
        ("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n", "symmetry"),
        ("%%MatrixMarket matrix coordinate real skew-symmetric\n1 1 1\n1 1 1\n", "symmetry"),
        ("%%MatrixMarket matrix coordinate real general\n1 1\n", "header"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", "count mismatch"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n2 2 2.0\n", "count mismatch"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", "bounds"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 0 1.0\n", "bounds"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n", "entry"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\nx y z\n", "entry"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(MatrixMarketError, match=match):
        lw.parse_matrix_market(text)


def test_roundtrip_identity_on_normalized(tmp_path):
    rng = np.random.default_rng(7)
    for trial in range(25):
        rows = int(rng.integers(1, 12))
        cols = int(rng.integers(1, 12))
        nnz = int(rng.integers(0, rows * cols + 1))
        m = lw.generate_random_csr(rows, cols, nnz, seed=trial)
        normalized = lw.csr_to_coo(m)  # sorted, duplicate-free
        text = lw.write_matrix_market(normalized)
        back = lw.parse_matrix_market(text)
        assert back.rows == normalized.rows and back.cols == normalized.cols
        np.testing.assert_array_equal(back.row, normalized.row)
        np.testing.assert_array_equal(back.col, normalized.col)
        np.testing.assert_array_equal(back.data, normalized.data)

        # cross-check the whole writer/parser pair against scipy
        path = tmp_path / f"t{trial}.mtx"
        path.write_text(text)
        ours = lw.coo_to_csr(back).to_dense()
        theirs = scipy.io.mmread(path).toarray() if nnz else np.zeros((rows, cols))
        np.testing.assert_allclose(ours, theirs)


def test_chesapeake_shaped_file_parses_to_39x39_340(tmp_path):
    rng = np.random.default_rng(13)
    pairs = set()
    while len(pairs) < 170:
        i, j = (int(v) for v in rng.integers(1, 40, 2))
        if i != j:
            pairs.add((max(i, j), min(i, j)))
    lines = ["%%MatrixMarket matrix coordinate pattern symmetric", "39 39 170"]
    lines += [f"{i} {j}" for i, j in sorted(pairs)]
    coo = lw.parse_matrix_market("\n".join(lines) + "\n")
    assert (coo.rows, coo.cols, coo.nnz) == (39, 39, 340)
    ts = lw.csr_tile_set(lw.coo_to_csr(coo))
    assert (ts.num_tiles, ts.num_atoms) == (39, 340)
