"""Vertex samples of u_h as whitespace-separated `x y u` lines for plotting."""

from pathlib import Path

from apps.spaces.spaces import FieldVector
from mafem.exceptions import ArtifactWriteError, InvalidArgumentError


def format_vertex_values(u: FieldVector) -> str:
    """One `x y u_h` line per mesh vertex; vertex dofs come first in V_h."""
    if u.space.kind != "scalar":
        raise InvalidArgumentError("Plot data is written for scalar fields only")
    mesh = u.space.mesh
    values = u.values[: mesh.num_vertices]
    lines = ["# x y u_h"]
    lines.extend(
        f"{x!r} {y!r} {value!r}"
        for (x, y), value in zip(mesh.vertices.tolist(), values.tolist())
    )
    return "\n".join(lines) + "\n"


def write_vertex_values(u: FieldVector, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(format_vertex_values(u))
    except OSError as e:
        raise ArtifactWriteError(f"Could not write plot data to {path}: {e}", path=path) from e
    return path
