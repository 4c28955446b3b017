"""
Canonical sparse matrices.

Entries are kept in CSR layout with sorted column indices and merged
duplicates, so two assemblies of the same operator compare equal.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

SYMMETRY_TOL = 1e-12


def _canonical(matrix) -> sp.csr_matrix:
    csr = sp.csr_matrix(matrix, dtype=float)
    csr.sum_duplicates()
    csr.sort_indices()
    return csr


@dataclass(frozen=True)
class SparseMatrix:
    """
    A CSR matrix plus a symmetry flag.

    Attributes:
        matrix: Canonical scipy CSR matrix.
        symmetric: Set only for square matrices with
            max |A_ij - A_ji| <= 1e-12 * max |A_ij|.
    """

    matrix: sp.csr_matrix
    symmetric: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _canonical(self.matrix))
        object.__setattr__(self, "symmetric", self._check_symmetry())

    def _check_symmetry(self) -> bool:
        rows, cols = self.shape
        if rows != cols:
            return False
        scale = self.max_abs
        if scale == 0.0:
            return True
        asymmetry = abs(self.matrix - self.matrix.T)
        return asymmetry.nnz == 0 or asymmetry.max() <= SYMMETRY_TOL * scale

    @classmethod
    def from_triplets(cls, rows, cols, values, shape: tuple[int, int]) -> "SparseMatrix":
        coo = sp.coo_matrix(
            (np.ravel(values), (np.ravel(rows), np.ravel(cols))), shape=shape
        )
        return cls(coo.tocsr())

    def __matmul__(self, other):
        return self.matrix @ other

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    @property
    def max_abs(self) -> float:
        return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Row, column and value arrays in row-major order."""
        coo = self.matrix.tocoo()
        return coo.row, coo.col, coo.data

    def rows(self, index) -> "SparseMatrix":
        return SparseMatrix(self.matrix[index, :])

    def columns(self, index) -> "SparseMatrix":
        return SparseMatrix(self.matrix[:, index])

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def scatter(cell_dofs: np.ndarray, local: np.ndarray, row_offset: int = 0, col_dofs=None):
    """
    Triplets for element matrices.

    Args:
        cell_dofs: (nt, n) global row dofs per element.
        local: (nt, n, m) element matrices.
        row_offset: Added to every row index.
        col_dofs: (nt, m) column dofs; defaults to cell_dofs.

    Returns:
        Flattened (rows, cols, values) in element order.
    """
    col_dofs = cell_dofs if col_dofs is None else col_dofs
    rows = np.broadcast_to(cell_dofs[:, :, None] + row_offset, local.shape)
    cols = np.broadcast_to(col_dofs[:, None, :], local.shape)
    return rows.ravel(), cols.ravel(), local.ravel()
