"""
Error tables as CSV.

Columns are fixed; unavailable values are written as empty fields and
floats keep their full repr so a table re-reads to identical values.
"""

import csv
import io
from pathlib import Path

from mafem.exceptions import ArtifactWriteError, InvalidArgumentError

from ..norms import ErrorReport

COLUMNS = (
    "h",
    "ndof_u",
    "ndof_sigma",
    "err_u_L2",
    "err_u_H1",
    "err_sigma_L2",
    "err_u_sup_interior",
    "newton_iters",
    "min_lambda1",
)
INTEGER_COLUMNS = frozenset({"ndof_u", "ndof_sigma", "newton_iters"})


def table_row(report: ErrorReport) -> dict:
    """Values of one report keyed by CSV column."""
    values = report.as_dict()
    values["h"] = values.pop("mesh_size_h")
    return {name: values[name] for name in COLUMNS}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_table(reports: list[ErrorReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for report in reports:
        row = table_row(report)
        writer.writerow([_cell(row[name]) for name in COLUMNS])
    return buf.getvalue()


def _value(name: str, raw: str):
    if raw == "":
        return None
    return int(raw) if name in INTEGER_COLUMNS else float(raw)


def parse_table(text: str) -> list[dict]:
    """
    Parse a table written by format_table.

    Returns:
        One dict per row, with ints, floats and None restored.
    """
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise InvalidArgumentError(f"Unexpected error table header {reader.fieldnames}")
    rows = []
    for record in reader:
        try:
            rows.append({name: _value(name, record[name]) for name in COLUMNS})
        except ValueError as e:
            raise InvalidArgumentError(f"Malformed error table row {record}: {e}") from e
    return rows


def write_table(reports: list[ErrorReport], path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(format_table(reports))
    except OSError as e:
        raise ArtifactWriteError(f"Could not write table to {path}: {e}", path=path) from e
    return path
