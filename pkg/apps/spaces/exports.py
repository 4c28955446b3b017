"""
Text dumps of finite element coefficient vectors.

Header line `space_kind degree ndof`, then one coefficient per line
with 17 significant digits. Matrix fields list the xx block, then xy,
then yy.
"""

from pathlib import Path

import numpy as np

from mafem.exceptions import ArtifactWriteError, InvalidArgumentError

from .spaces import FieldVector


def format_field(field: FieldVector) -> str:
    lines = [f"{field.space.kind} {field.space.degree} {field.space.ndof}"]
    lines.extend(f"{value:.17g}" for value in field.values.tolist())
    return "\n".join(lines) + "\n"


def parse_field(text: str) -> tuple[str, int, np.ndarray]:
    """
    Parse a field dump.

    Returns:
        Tuple of (space kind, degree, coefficients).
    """
    lines = [line for line in text.splitlines() if line.strip()]
    try:
        kind, degree, ndof = lines[0].split()
        degree, ndof = int(degree), int(ndof)
        values = np.array([float(line) for line in lines[1:]])
    except (IndexError, ValueError) as e:
        raise InvalidArgumentError(f"Malformed field dump: {e}") from e
    if kind not in ("scalar", "matrix"):
        raise InvalidArgumentError(f"Unknown space kind {kind!r}")
    if values.size != ndof:
        raise InvalidArgumentError(f"Field dump declares {ndof} values, found {values.size}")
    return kind, degree, values


def write_field(field: FieldVector, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(format_field(field))
    except OSError as e:
        raise ArtifactWriteError(f"Could not write field to {path}: {e}", path=path) from e
    return path
