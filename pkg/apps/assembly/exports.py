"""
Coordinate-format dumps of sparse matrices.

Header `nrows ncols nnz`, then one `i j value` line per stored entry in
row-major order, values with 17 significant digits.
"""

from pathlib import Path

import numpy as np

from mafem.exceptions import ArtifactWriteError, InvalidArgumentError

from .sparse import SparseMatrix


def format_sparse(matrix: SparseMatrix) -> str:
    rows, cols, values = matrix.triplets()
    lines = ["{} {} {}".format(*matrix.shape, matrix.nnz)]
    lines.extend(
        f"{i} {j} {v:.17g}" for i, j, v in zip(rows.tolist(), cols.tolist(), values.tolist())
    )
    return "\n".join(lines) + "\n"


def parse_sparse(text: str) -> SparseMatrix:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    try:
        nrows, ncols, nnz = (int(v) for v in rows[0])
        entries = rows[1:]
        i = np.array([int(r[0]) for r in entries], dtype=np.int64)
        j = np.array([int(r[1]) for r in entries], dtype=np.int64)
        v = np.array([float(r[2]) for r in entries])
    except (IndexError, ValueError) as e:
        raise InvalidArgumentError(f"Malformed matrix dump: {e}") from e
    if len(entries) != nnz:
        raise InvalidArgumentError(f"Matrix dump declares {nnz} entries, found {len(entries)}")
    return SparseMatrix.from_triplets(i, j, v, (nrows, ncols))


def write_sparse(matrix: SparseMatrix, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(format_sparse(matrix))
    except OSError as e:
        raise ArtifactWriteError(f"Could not write matrix to {path}: {e}", path=path) from e
    return path
