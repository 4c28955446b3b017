"""
Plain-text mesh format.

Layout, one record per line, whitespace separated:
    nv nt nb
    x y                (nv lines)
    i j k              (nt lines, 0-based vertex indices)
    i j marker         (nb lines, boundary edges)
"""

from pathlib import Path

import numpy as np

from mafem.exceptions import ArtifactWriteError, InvalidArgumentError

from .mesh import Mesh

BOUNDARY_MARKER = 1


def format_mesh(mesh: Mesh) -> str:
    """Serialize a mesh to the text format."""
    lines = [f"{mesh.num_vertices} {mesh.num_triangles} {len(mesh.boundary_edges)}"]
    lines.extend(f"{x!r} {y!r}" for x, y in mesh.vertices.tolist())
    lines.extend(f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist())
    lines.extend(
        f"{edge.vertices[0]} {edge.vertices[1]} {BOUNDARY_MARKER}"
        for edge in mesh.boundary_edges
    )
    return "\n".join(lines) + "\n"


def parse_mesh(text: str) -> Mesh:
    """
    Parse the text format and rebuild the mesh.

    The boundary records must match the topological boundary of the
    triangles; a mismatch means the file does not describe a conforming
    triangulation of a single domain.
    """
    rows = [line.split() for line in text.splitlines() if line.strip()]
    try:
        nv, nt, nb = (int(v) for v in rows[0])
        vertices = np.array(rows[1 : 1 + nv], dtype=float)
        triangles = np.array(rows[1 + nv : 1 + nv + nt], dtype=np.int64)
        boundary = np.array(rows[1 + nv + nt : 1 + nv + nt + nb], dtype=np.int64)
    except (IndexError, ValueError) as e:
        raise InvalidArgumentError(f"Malformed mesh file: {e}") from e

    if vertices.shape != (nv, 2) or triangles.shape != (nt, 3) or boundary.shape != (nb, 3):
        raise InvalidArgumentError("Mesh file record counts do not match its header")

    mesh = Mesh(vertices, triangles)

    declared = {tuple(sorted(pair)) for pair in boundary[:, :2].tolist()}
    actual = {tuple(sorted(edge.vertices)) for edge in mesh.boundary_edges}
    if declared != actual:
        raise InvalidArgumentError("Boundary records do not match the triangulation")
    return mesh


def write_mesh(mesh: Mesh, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(format_mesh(mesh))
    except OSError as e:
        raise ArtifactWriteError(f"Could not write mesh to {path}: {e}", path=path) from e
    return path


def read_mesh(path: Path) -> Mesh:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InvalidArgumentError(f"Could not read mesh file {path}: {e}") from e
    return parse_mesh(text)
