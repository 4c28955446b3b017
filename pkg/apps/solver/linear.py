"""
Sparse direct solves.

Uses SuperLU (scipy.sparse.linalg.splu) with partial pivoting. Every
solution is checked against the backward error bound
||A x - b|| <= 1e-10 (||A|| ||x|| + ||b||) in the infinity norm.
"""

import logging

import numpy as np
import scipy.sparse.linalg as spla

from apps.assembly.sparse import SparseMatrix
from mafem.exceptions import FactorizationError, InvalidArgumentError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
PIVOT_TOL = np.finfo(float).eps


class FactorizedMatrix:
    """An LU factorization that can be reused for many right-hand sides."""

    def __init__(self, matrix: SparseMatrix) -> None:
        rows, cols = matrix.shape
        if rows != cols:
            raise InvalidArgumentError(f"Cannot factorize a {rows}x{cols} matrix")
        self.matrix = matrix
        self.norm = float(abs(matrix.matrix).sum(axis=1).max()) if matrix.nnz else 0.0
        try:
            self._lu = spla.splu(matrix.matrix.tocsc())
        except RuntimeError as e:
            raise FactorizationError(f"Sparse LU failed: {e}") from e
        self._check_pivots()

    def _check_pivots(self) -> None:
        pivots = np.abs(self._lu.U.diagonal())
        if pivots.size == 0:
            return
        smallest = int(np.argmin(pivots))
        if pivots[smallest] <= PIVOT_TOL * pivots.max():
            column = int(np.argsort(self._lu.perm_c)[smallest])
            raise FactorizationError(
                f"Matrix is singular to working precision (pivot {pivots[smallest]:.3e} "
                f"at column {column})",
                pivot=column,
            )

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        x = self._lu.solve(rhs)
        residual = np.max(np.abs(self.matrix @ x - rhs), initial=0.0)
        bound = RESIDUAL_TOL * (self.norm * np.max(np.abs(x), initial=0.0) + np.max(np.abs(rhs), initial=0.0))
        if not np.isfinite(residual) or residual > bound:
            raise FactorizationError(
                f"Linear solve residual {residual:.3e} exceeds bound {bound:.3e}"
            )
        return x


def solve_linear(matrix: SparseMatrix, rhs) -> np.ndarray:
    """
    Solve matrix @ x = rhs.

    Raises:
        FactorizationError: If the matrix is singular to working precision or the
            computed solution fails the residual check.
    """
    logger.debug("Direct solve of %dx%d system, nnz=%d", *matrix.shape, matrix.nnz)
    return FactorizedMatrix(matrix).solve(rhs)
