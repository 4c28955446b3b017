"""
Global Lagrange spaces V_h and Σ_h.

Degrees of freedom are numbered vertices first, then edge dofs (edges in
lexicographic order of their sorted vertex pairs, each edge's dofs running
from its smaller to its larger vertex index), then interior dofs by
triangle. Σ_h stores the symmetric matrix fields as three scalar blocks
(xx, xy, yy), so symmetry holds by construction.
"""

import logging
from dataclasses import dataclass

import numpy as np

from apps.elements.reference import eval_basis, get_reference_element
from apps.meshes.mesh import LOCAL_EDGES, Mesh
from mafem.exceptions import InvalidArgumentError

from .functions import evaluate_matrix, evaluate_scalar

logger = logging.getLogger(__name__)

COMPONENTS = ("xx", "xy", "yy")


class ScalarSpace:
    """
    Continuous piecewise polynomials of degree k on a mesh.

    Attributes:
        mesh: The triangulation.
        degree: Polynomial degree k.
        element: Reference element of degree k.
        cell_dofs: (nt, nloc) global dof of each local node.
        dof_coordinates: (ndof, 2) Lagrange point of each dof.
        boundary_dofs: Sorted dofs whose Lagrange point lies on the boundary.
        interior_dofs: Sorted complement of boundary_dofs.
    """

    kind = "scalar"

    def __init__(self, mesh: Mesh, degree: int) -> None:
        self.mesh = mesh
        self.degree = degree
        self.element = get_reference_element(degree)
        self._tabulations = {}
        self._build_geometry()
        self._build_dofmap()
        logger.debug(
            "Scalar space P%d on %r: %d dofs (%d on boundary)",
            degree,
            mesh,
            self.ndof,
            self.boundary_dofs.size,
        )

    def __repr__(self) -> str:
        return f"ScalarSpace(P{self.degree}, ndof={self.ndof})"

    def _build_geometry(self) -> None:
        p = self.mesh.vertices[self.mesh.triangles]
        self.origins = p[:, 0]
        self.jacobians = np.stack((p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=2)
        self.determinants = np.linalg.det(self.jacobians)
        self.inverse_jacobians = np.linalg.inv(self.jacobians)

    def _build_dofmap(self) -> None:
        mesh, element, k = self.mesh, self.element, self.degree
        nv, ne, nt = mesh.num_vertices, mesh.num_edges, mesh.num_triangles
        tris = mesh.triangles

        cell_dofs = np.empty((nt, element.num_nodes), dtype=np.int64)
        cell_dofs[:, :3] = tris
        for local_edge, (a, b) in enumerate(LOCAL_EDGES):
            edge = mesh.triangle_edges[:, local_edge]
            forward = tris[:, a] < tris[:, b]
            for m, node in enumerate(element.edge_nodes[local_edge], start=1):
                position = np.where(forward, m, k - m)
                cell_dofs[:, node] = nv + edge * (k - 1) + position - 1

        interior = list(element.interior_nodes)
        offset = nv + ne * (k - 1)
        if interior:
            cell_dofs[:, interior] = (
                offset + np.arange(nt)[:, None] * len(interior) + np.arange(len(interior))
            )

        self.cell_dofs = cell_dofs
        self.ndof = offset + nt * len(interior)

        coords = self.map_points(element.nodes)
        self.dof_coordinates = np.empty((self.ndof, 2))
        self.dof_coordinates[cell_dofs.ravel()] = coords.reshape(-1, 2)
        self.dof_coordinates[:nv] = mesh.vertices

        boundary = [
            cell_dofs[edge.triangle, element.edge_closure(edge.local_edge)]
            for edge in mesh.boundary_edges
        ]
        self.boundary_dofs = np.unique(np.concatenate(boundary))
        mask = np.ones(self.ndof, dtype=bool)
        mask[self.boundary_dofs] = False
        self.interior_dofs = np.nonzero(mask)[0]

    def map_points(self, barycentric) -> np.ndarray:
        """Map reference points to every triangle; returns (nt, npts, 2)."""
        bary = np.asarray(barycentric, dtype=float).reshape(-1, 3)
        return self.origins[:, None, :] + np.einsum("tij,qj->tqi", self.jacobians, bary[:, 1:])

    def tabulate(self, quad) -> tuple[np.ndarray, np.ndarray]:
        """
        Basis values and physical gradients at the points of a rule.

        Returns:
            values (nq, nloc) and gradients (nt, nq, nloc, 2).
        """
        if quad not in self._tabulations:
            values, ref_grads = self.element.tabulate(quad.points)
            grads = np.einsum("qnj,tji->tqni", ref_grads, self.inverse_jacobians)
            self._tabulations[quad] = (values, grads)
        return self._tabulations[quad]

    def integration_weights(self, quad) -> np.ndarray:
        """Physical weights (nt, nq): reference weights times |det J|."""
        return np.abs(self.determinants)[:, None] * quad.weights[None, :]

    def evaluate(self, coefficients, quad) -> tuple[np.ndarray, np.ndarray]:
        """Field values (nt, nq) and gradients (nt, nq, 2) at rule points."""
        values, grads = self.tabulate(quad)
        local = np.asarray(coefficients)[self.cell_dofs]
        return local @ values.T, np.einsum("tn,tqni->tqi", local, grads)


class MatrixSpace:
    """Symmetric 2 x 2 matrix fields with entries in a scalar space."""

    kind = "matrix"
    components = COMPONENTS

    def __init__(self, scalar: ScalarSpace) -> None:
        self.scalar = scalar

    def __repr__(self) -> str:
        return f"MatrixSpace(P{self.degree}, ndof={self.ndof})"

    @property
    def mesh(self) -> Mesh:
        return self.scalar.mesh

    @property
    def degree(self) -> int:
        return self.scalar.degree

    @property
    def ndof(self) -> int:
        return 3 * self.scalar.ndof

    def split(self, coefficients) -> np.ndarray:
        """View the coefficients as (3, n): rows xx, xy, yy."""
        return np.asarray(coefficients).reshape(3, self.scalar.ndof)

    def evaluate(self, coefficients, quad) -> np.ndarray:
        """Component values (nt, nq, 3) at rule points."""
        values, _ = self.scalar.tabulate(quad)
        local = self.split(coefficients)[:, self.scalar.cell_dofs]
        return np.einsum("ctn,qn->tqc", local, values)


@dataclass
class FieldVector:
    """Coefficients of a finite element function in its owning space."""

    space: ScalarSpace | MatrixSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.space.ndof,):
            raise InvalidArgumentError(
                f"Field has {self.values.size} coefficients, "
                f"space {self.space!r} needs {self.space.ndof}"
            )

    def copy(self) -> "FieldVector":
        return FieldVector(self.space, self.values.copy())


def interpolate(space: ScalarSpace, function) -> FieldVector:
    """Lagrange interpolant I_h: nodal values at every dof's Lagrange point."""
    x, y = space.dof_coordinates.T
    return FieldVector(space, evaluate_scalar(function, x, y))


def interpolate_matrix(space: MatrixSpace, function) -> FieldVector:
    """Componentwise Lagrange interpolant of a symmetric matrix function."""
    x, y = space.scalar.dof_coordinates.T
    components = evaluate_matrix(function, x, y)
    return FieldVector(space, components.T.ravel())


def eval_field(space, coeffs: FieldVector, triangle: int, point):
    """
    Evaluate a field and its physical gradient at a point of one triangle.

    Args:
        space: ScalarSpace or MatrixSpace owning the coefficients.
        coeffs: The field.
        triangle: Triangle index.
        point: Barycentric coordinates within the triangle.

    Returns:
        For scalar fields (value, gradient (2,)); for matrix fields
        (value (2, 2), gradient (2, 2, 2)) with gradient[i, j] the gradient
        of entry (i, j).
    """
    scalar = space.scalar if space.kind == "matrix" else space
    if not 0 <= triangle < scalar.mesh.num_triangles:
        raise InvalidArgumentError(f"Triangle index {triangle} out of range")

    values, ref_grads = eval_basis(scalar.element, point)
    grads = ref_grads @ scalar.inverse_jacobians[triangle]
    dofs = scalar.cell_dofs[triangle]

    if space.kind == "scalar":
        local = coeffs.values[dofs]
        return float(local @ values), local @ grads

    local = space.split(coeffs.values)[:, dofs]
    xx, xy, yy = local @ values
    gxx, gxy, gyy = local @ grads
    value = np.array([[xx, xy], [xy, yy]])
    gradient = np.array([[gxx, gxy], [gxy, gyy]])
    return value, gradient


def set_boundary_values(space: ScalarSpace, coeffs: FieldVector, g) -> FieldVector:
    """Overwrite boundary dofs with g at their Lagrange points."""
    x, y = space.dof_coordinates[space.boundary_dofs].T
    result = coeffs.copy()
    result.values[space.boundary_dofs] = evaluate_scalar(g, x, y, name="boundary data")
    return result
