"""
Conforming triangulations of convex polygonal domains.

Provides the immutable Mesh type together with the constructors used by
the convergence studies:
- structured diagonal-split grids on rectangles
- centroid fans of convex polygons
- uniform (red) refinement, which halves the mesh size
- selection of triangles at a given distance from the boundary
"""

import logging
from dataclasses import dataclass

import numpy as np

from mafem.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

# Local edge l of a triangle joins local vertices l and (l + 1) % 3
LOCAL_EDGES = ((0, 1), (1, 2), (2, 0))

GEOMETRY_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryEdge:
    """A boundary edge, oriented counterclockwise as in its triangle."""

    vertices: tuple[int, int]
    triangle: int
    local_edge: int
    normal: tuple[float, float]


@dataclass(frozen=True)
class InteriorRegion:
    """Triangles whose vertices all lie at least `margin` from the boundary."""

    margin: float
    selected_triangles: frozenset[int]
    empty: bool


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def polygon_signed_area(polygon: np.ndarray) -> float:
    """Shoelace formula; positive for counterclockwise vertex order."""
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def rectangle_polygon(bounds: tuple[float, float, float, float]) -> np.ndarray:
    """Counterclockwise corners of the rectangle (xmin, ymin, xmax, ymax)."""
    xmin, ymin, xmax, ymax = bounds
    return np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])


class Mesh:
    """
    Immutable conforming triangulation.

    Triangles are stored counterclockwise. Edges are the sorted vertex
    pairs in lexicographic order; this ordering fixes the global numbering
    of edge degrees of freedom in the finite element spaces.

    Attributes:
        vertices: (nv, 2) vertex coordinates.
        triangles: (nt, 3) vertex indices, counterclockwise.
        edges: (ne, 2) sorted vertex pairs, lexicographically ordered.
        triangle_edges: (nt, 3) edge index of each local edge.
        edge_triangles: (ne, 2) adjacent triangles, -1 in the second
            column for boundary edges.
        boundary_edges: Boundary edges with outward unit normals.
        mesh_size_h: Longest edge length.
    """

    def __init__(self, vertices, triangles, validate: bool = True) -> None:
        self.vertices = _readonly(np.array(vertices, dtype=float).reshape(-1, 2))
        self.triangles = _readonly(np.array(triangles, dtype=np.int64).reshape(-1, 3))

        if validate:
            self._validate()
        self._build_mappings()

    def __repr__(self) -> str:
        return (
            f"Mesh(nv={self.num_vertices}, nt={self.num_triangles}, "
            f"h={self.mesh_size_h:.4g})"
        )

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())

    def _signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def _validate(self) -> None:
        if self.num_triangles == 0:
            raise InvalidArgumentError("Mesh has no triangles")
        if self.triangles.min() < 0 or self.triangles.max() >= self.num_vertices:
            raise InvalidArgumentError("Triangle references a missing vertex")
        areas = self._signed_areas()
        bad = np.nonzero(areas <= 0.0)[0]
        if bad.size:
            raise InvalidArgumentError(
                f"Triangle {int(bad[0])} is degenerate or clockwise "
                f"(signed area {areas[bad[0]]:.3e})"
            )

    def _build_mappings(self) -> None:
        nt = self.num_triangles
        local = self.triangles[:, np.array(LOCAL_EDGES).reshape(-1)].reshape(-1, 2)
        pairs = np.sort(local, axis=1)
        edges, inverse, counts = np.unique(
            pairs, axis=0, return_inverse=True, return_counts=True
        )
        inverse = inverse.reshape(-1)

        if np.any(counts > 2):
            raise InvalidArgumentError("Edge shared by more than two triangles")

        owner = np.repeat(np.arange(nt), 3)
        order = np.argsort(inverse, kind="stable")
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))

        edge_triangles = np.full((edges.shape[0], 2), -1, dtype=np.int64)
        edge_triangles[:, 0] = owner[order[starts]]
        shared = counts == 2
        edge_triangles[shared, 1] = owner[order[starts[shared] + 1]]

        # An interior edge must be traversed in opposite directions
        first, second = order[starts[shared]], order[starts[shared] + 1]
        if np.any(local[first, 0] == local[second, 0]):
            raise InvalidArgumentError("Inconsistent triangle orientation")

        boundary_occurrences = order[starts[~shared]]
        boundary = []
        for occurrence in boundary_occurrences:
            a, b = (int(v) for v in local[occurrence])
            d = self.vertices[b] - self.vertices[a]
            length = float(np.hypot(d[0], d[1]))
            boundary.append(
                BoundaryEdge(
                    vertices=(a, b),
                    triangle=int(occurrence // 3),
                    local_edge=int(occurrence % 3),
                    normal=(float(d[1] / length), float(-d[0] / length)),
                )
            )

        self.edges = _readonly(edges.astype(np.int64))
        self.triangle_edges = _readonly(inverse.reshape(nt, 3).astype(np.int64))
        self.edge_triangles = _readonly(edge_triangles)
        self.boundary_edges = tuple(boundary)
        self.boundary_edge_indices = _readonly(np.nonzero(~shared)[0])
        self.areas = _readonly(np.abs(self._signed_areas()))

        lengths = np.linalg.norm(
            self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]], axis=1
        )
        self.mesh_size_h = float(lengths.max())

    def boundary_segments(self) -> np.ndarray:
        """Return boundary edges as an (nb, 2, 2) array of endpoint coordinates."""
        pairs = np.array([edge.vertices for edge in self.boundary_edges])
        return self.vertices[pairs]

    def distance_to_boundary(self, points) -> np.ndarray:
        """Euclidean distance from each point to the nearest boundary edge."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        segments = self.boundary_segments()
        a = segments[:, 0][None, :, :]
        d = (segments[:, 1] - segments[:, 0])[None, :, :]
        rel = points[:, None, :] - a
        t = np.clip(np.sum(rel * d, axis=2) / np.sum(d * d, axis=2), 0.0, 1.0)
        closest = a + t[:, :, None] * d
        return np.min(np.linalg.norm(points[:, None, :] - closest, axis=2), axis=1)

    def locate(self, point, tol: float = 1e-10) -> int | None:
        """Return the index of a triangle containing `point`, or None."""
        p = self.vertices[self.triangles]
        x = np.asarray(point, dtype=float)
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        r = x - p[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        l1 = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / det
        l2 = (d1[:, 0] * r[:, 1] - d1[:, 1] * r[:, 0]) / det
        inside = (l1 >= -tol) & (l2 >= -tol) & (l1 + l2 <= 1.0 + tol)
        hits = np.nonzero(inside)[0]
        return int(hits[0]) if hits.size else None

    def contains(self, point, tol: float = 1e-10) -> bool:
        return self.locate(point, tol) is not None


def build_structured_mesh(bounds: tuple[float, float, float, float], n: int) -> Mesh:
    """
    Triangulate a rectangle with an n x n grid split along diagonals.

    Every cell is cut from its bottom-left to its top-right corner, which
    keeps meshes reproducible across runs.

    Args:
        bounds: Rectangle as (xmin, ymin, xmax, ymax).
        n: Subdivisions per side.

    Returns:
        Mesh with 2n² triangles.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgumentError(f"Subdivisions must be a positive integer, got {n!r}")
    xmin, ymin, xmax, ymax = (float(v) for v in bounds)
    if not (xmax > xmin and ymax > ymin):
        raise InvalidArgumentError(f"Degenerate rectangle {bounds!r}")

    xs = np.linspace(xmin, xmax, n + 1)
    ys = np.linspace(ymin, ymax, n + 1)
    gx, gy = np.meshgrid(xs, ys)
    vertices = np.column_stack((gx.ravel(), gy.ravel()))

    j, i = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = np.column_stack((v00, v10, v11))
    upper = np.column_stack((v00, v11, v01))
    triangles = np.stack((lower, upper), axis=1).reshape(-1, 3)

    mesh = Mesh(vertices, triangles)
    logger.debug("Built structured mesh %r on %s", mesh, bounds)
    return mesh


def build_polygon_mesh(polygon, refinements: int = 0) -> Mesh:
    """
    Fan-triangulate a convex polygon from its centroid, then refine.

    Triangles are not fanned: the input triangle is the coarse mesh.

    Args:
        polygon: Counterclockwise convex vertex list.
        refinements: Rounds of uniform refinement.

    Returns:
        Mesh covering the polygon.
    """
    poly = np.asarray(polygon, dtype=float).reshape(-1, 2)
    if poly.shape[0] < 3:
        raise InvalidArgumentError("Polygon needs at least 3 vertices")
    if refinements < 0:
        raise InvalidArgumentError("Refinement count must be nonnegative")

    area = polygon_signed_area(poly)
    if area <= 0.0:
        raise InvalidArgumentError("Polygon is clockwise or degenerate")

    edge_vectors = np.roll(poly, -1, axis=0) - poly
    turns = edge_vectors[:, 0] * np.roll(edge_vectors, -1, axis=0)[:, 1] - (
        edge_vectors[:, 1] * np.roll(edge_vectors, -1, axis=0)[:, 0]
    )
    scale = float(np.max(np.abs(edge_vectors))) ** 2
    if np.any(turns < -GEOMETRY_TOL * scale):
        raise InvalidArgumentError("Polygon is not convex")

    # Area centroid of the polygon
    x, y = poly[:, 0], poly[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    cx = float(np.sum((x + np.roll(x, -1)) * cross)) / (6.0 * area)
    cy = float(np.sum((y + np.roll(y, -1)) * cross)) / (6.0 * area)

    m = poly.shape[0]
    if m == 3:
        # A triangle is its own coarsest mesh
        mesh = Mesh(poly, [[0, 1, 2]])
    else:
        vertices = np.vstack((poly, [[cx, cy]]))
        idx = np.arange(m)
        triangles = np.column_stack((idx, (idx + 1) % m, np.full(m, m)))
        mesh = Mesh(vertices, triangles)

    for _ in range(refinements):
        mesh = refine_uniform(mesh)
    return mesh


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into four through its edge midpoints."""
    nv = mesh.num_vertices
    midpoints = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
    vertices = np.vstack((mesh.vertices, midpoints))

    a, b, c = mesh.triangles.T
    m_ab, m_bc, m_ca = (nv + mesh.triangle_edges).T
    children = np.stack(
        (
            np.column_stack((a, m_ab, m_ca)),
            np.column_stack((m_ab, b, m_bc)),
            np.column_stack((m_ca, m_bc, c)),
            np.column_stack((m_ab, m_bc, m_ca)),
        ),
        axis=1,
    ).reshape(-1, 3)
    return Mesh(vertices, children)


def select_interior(mesh: Mesh, margin: float) -> InteriorRegion:
    """
    Select the triangles lying entirely at distance `margin` from the boundary.

    A triangle qualifies when each of its vertices is at least `margin`
    from the boundary. A margin larger than the inradius returns an empty
    selection with the `empty` flag set.
    """
    if margin < 0:
        raise InvalidArgumentError(f"Margin must be nonnegative, got {margin}")
    if margin == 0:
        selected = frozenset(range(mesh.num_triangles))
    else:
        distance = mesh.distance_to_boundary(mesh.vertices)
        # Small slack so vertices sitting exactly on the margin line count
        far = distance >= margin - GEOMETRY_TOL
        keep = np.all(far[mesh.triangles], axis=1)
        selected = frozenset(int(t) for t in np.nonzero(keep)[0])

    if not selected:
        logger.warning("Interior margin %.3g selects no triangles", margin)
    return InteriorRegion(margin=float(margin), selected_triangles=selected, empty=not selected)
