"""Tests for the canonical sparse matrix wrapper and its text dump."""

import numpy as np
import pytest

from apps.assembly.exports import format_sparse, parse_sparse, write_sparse
from apps.assembly.sparse import SparseMatrix
from mafem.exceptions import ArtifactWriteError, InvalidArgumentError


def test_duplicates_are_merged_and_sorted():
    matrix = SparseMatrix.from_triplets([1, 0, 1, 1], [2, 0, 0, 2], [1.0, 3.0, 4.0, 2.0], (2, 3))
    assert matrix.nnz == 3
    rows, cols, values = matrix.triplets()
    assert rows.tolist() == [0, 1, 1]
    assert cols.tolist() == [0, 0, 2]
    assert values.tolist() == [3.0, 4.0, 3.0]


def test_symmetry_flag():
    symmetric = SparseMatrix.from_triplets([0, 1, 0], [1, 0, 0], [2.0, 2.0, 5.0], (2, 2))
    assert symmetric.symmetric
    skewed = SparseMatrix.from_triplets([0, 1], [1, 0], [2.0, 2.0 + 1e-6], (2, 2))
    assert not skewed.symmetric
    rectangular = SparseMatrix.from_triplets([0], [0], [1.0], (2, 3))
    assert not rectangular.symmetric


def test_tiny_asymmetry_within_tolerance():
    matrix = SparseMatrix.from_triplets([0, 1], [1, 0], [1.0, 1.0 + 1e-14], (2, 2))
    assert matrix.symmetric


def test_row_and_column_selection():
    dense = np.arange(12, dtype=float).reshape(3, 4)
    rows, cols = np.nonzero(dense)
    matrix = SparseMatrix.from_triplets(rows, cols, dense[rows, cols], dense.shape)
    np.testing.assert_array_equal(matrix.rows([0, 2]).toarray(), dense[[0, 2]])
    np.testing.assert_array_equal(matrix.columns([1, 3]).toarray(), dense[:, [1, 3]])


def test_coordinate_dump():
    matrix = SparseMatrix.from_triplets([0, 2], [1, 0], [0.1, -2.5], (3, 2))
    text = format_sparse(matrix)
    assert text.splitlines() == ["3 2 2", "0 1 0.10000000000000001", "2 0 -2.5"]
    np.testing.assert_array_equal(parse_sparse(text).toarray(), matrix.toarray())


def test_dump_entry_count_checked():
    with pytest.raises(InvalidArgumentError):
        parse_sparse("2 2 2\n0 0 1.0\n")


def test_write_dump(tmp_path):
    matrix = SparseMatrix.from_triplets([0, 1], [0, 1], [1.0, 2.0], (2, 2))
    path = write_sparse(matrix, tmp_path / "m.txt")
    assert path.read_text() == format_sparse(matrix)
    with pytest.raises(ArtifactWriteError):
        write_sparse(matrix, tmp_path / "missing" / "m.txt")
