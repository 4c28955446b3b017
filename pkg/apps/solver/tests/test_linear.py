"""Tests for the sparse direct solver."""

import numpy as np
import pytest
import scipy.sparse as sp

from apps.assembly.sparse import SparseMatrix
from apps.solver.linear import solve_linear
from mafem.exceptions import FactorizationError, InvalidArgumentError


def test_identity():
    rhs = np.array([1.0, -2.0, 3.5])
    np.testing.assert_array_equal(solve_linear(SparseMatrix(sp.identity(3)), rhs), rhs)


def test_diagonal():
    matrix = SparseMatrix(sp.diags([2.0, 4.0]))
    np.testing.assert_allclose(solve_linear(matrix, [2.0, 8.0]), [1.0, 2.0])


def test_random_spd():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((50, 50))
    dense = g.T @ g + np.eye(50)
    rhs = rng.standard_normal(50)
    x = solve_linear(SparseMatrix(sp.csr_matrix(dense)), rhs)
    assert np.max(np.abs(dense @ x - rhs)) <= 1e-10 * (np.abs(dense).sum(axis=1).max() * np.abs(x).max() + np.abs(rhs).max())


def test_singular_reports_pivot():
    dense = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(FactorizationError) as excinfo:
        solve_linear(SparseMatrix(sp.csr_matrix(dense)), np.ones(3))
    assert excinfo.value.pivot is None or excinfo.value.pivot in (0, 1)


def test_structurally_singular():
    matrix = SparseMatrix.from_triplets([0], [0], [1.0], (2, 2))
    with pytest.raises(FactorizationError):
        solve_linear(matrix, np.ones(2))


def test_rectangular_rejected():
    with pytest.raises(InvalidArgumentError):
        solve_linear(SparseMatrix.from_triplets([0], [0], [1.0], (2, 3)), np.ones(2))
