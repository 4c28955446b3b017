"""
Linear operators of the mixed Hessian formulation.

For u in V_h and sigma, tau in Sigma_h the first equation reads

    (sigma, tau) + (div tau, Du) - <Du, tau n> = 0    for all tau,

assembled as M sigma + B_int u_int + B_bdry u_bdry = 0. The divergence
of a matrix field is taken row by row.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.elements.quadrature import QuadratureRule, make_interval_quadrature
from apps.meshes.mesh import LOCAL_EDGES
from apps.solver.linear import FactorizedMatrix
from apps.spaces.functions import evaluate_scalar
from apps.spaces.spaces import FieldVector, MatrixSpace, ScalarSpace
from mafem.exceptions import InvalidArgumentError

from .sparse import SparseMatrix, scatter

logger = logging.getLogger(__name__)

# Matrix entries (r, s) set by a unit basis field of each component
_ENTRIES = {
    "xx": ((0, 0),),
    "xy": ((0, 1), (1, 0)),
    "yy": ((1, 1),),
}


def _require_exactness(quad: QuadratureRule, needed: int, what: str) -> None:
    if quad.exactness_degree < needed:
        raise InvalidArgumentError(
            f"{what} needs quadrature exactness >= {needed}, got {quad.exactness_degree}"
        )


def _check_compatible(vspace: ScalarSpace, mspace: MatrixSpace) -> None:
    if vspace.mesh is not mspace.mesh or vspace.degree != mspace.degree:
        raise InvalidArgumentError(
            f"Spaces {vspace!r} and {mspace!r} do not share mesh and degree"
        )


def scalar_mass(space: ScalarSpace, quad: QuadratureRule) -> SparseMatrix:
    """Scalar mass matrix (phi_j, phi_i)."""
    values, _ = space.tabulate(quad)
    weights = space.integration_weights(quad)
    local = np.einsum("tq,qi,qj->tij", weights, values, values)
    return SparseMatrix.from_triplets(*scatter(space.cell_dofs, local), (space.ndof, space.ndof))


def assemble_mass(space: MatrixSpace, quad: QuadratureRule) -> SparseMatrix:
    """
    Frobenius mass matrix on Sigma_h.

    Blocks are ordered xx, xy, yy. The xy block carries a factor 2 since
    the off-diagonal entry appears twice in A : B.

    Raises:
        InvalidArgumentError: If quad does not integrate degree 2k exactly.
    """
    _require_exactness(quad, 2 * space.degree, "Mass matrix")
    scalar = space.scalar
    values, _ = scalar.tabulate(quad)
    weights = scalar.integration_weights(quad)
    local = np.einsum("tq,qi,qj->tij", weights, values, values)

    n = scalar.ndof
    parts = [
        scatter(scalar.cell_dofs, factor * local, row_offset=c * n, col_dofs=scalar.cell_dofs + c * n)
        for c, factor in enumerate((1.0, 2.0, 1.0))
    ]
    rows, cols, vals = (np.concatenate(arrays) for arrays in zip(*parts))
    mass = SparseMatrix.from_triplets(rows, cols, vals, (space.ndof, space.ndof))
    logger.debug("Assembled mass matrix %dx%d, nnz=%d", *mass.shape, mass.nnz)
    return mass


def _boundary_tabulation(vspace: ScalarSpace, exactness: int):
    """Basis values, physical gradients, weights and normals on boundary edges."""
    mesh, element = vspace.mesh, vspace.element
    s, w = make_interval_quadrature(exactness)
    edges = mesh.boundary_edges
    triangles = np.array([edge.triangle for edge in edges], dtype=np.int64)
    normals = np.array([edge.normal for edge in edges])

    bary = np.zeros((len(edges), s.size, 3))
    lengths = np.empty(len(edges))
    for e, edge in enumerate(edges):
        a, b = LOCAL_EDGES[edge.local_edge]
        bary[e, :, a] = 1.0 - s
        bary[e, :, b] = s
        corners = mesh.vertices[mesh.triangles[edge.triangle]]
        lengths[e] = np.linalg.norm(corners[b] - corners[a])

    values, ref_grads = element.tabulate(bary.reshape(-1, 3))
    values = values.reshape(len(edges), s.size, -1)
    ref_grads = ref_grads.reshape(len(edges), s.size, -1, 2)
    grads = np.einsum("eqnj,eji->eqni", ref_grads, vspace.inverse_jacobians[triangles])
    weights = lengths[:, None] * w[None, :]
    return triangles, values, grads, weights, normals


def assemble_divgrad(
    vspace: ScalarSpace, mspace: MatrixSpace, quad: QuadratureRule
) -> tuple[SparseMatrix, SparseMatrix]:
    """
    Assemble (div tau, Du) - <Du, tau n>.

    Rows are Sigma_h dofs, columns V_h dofs. Boundary integrals use a
    Gauss rule of exactness 2k on each boundary edge.

    Returns:
        (B_int, B_bdry): the columns of interior and boundary V_h dofs.

    Raises:
        InvalidArgumentError: If the spaces differ in mesh or degree.
    """
    _check_compatible(vspace, mspace)
    cell_dofs, n = vspace.cell_dofs, vspace.ndof

    _, grads = vspace.tabulate(quad)
    weights = vspace.integration_weights(quad)
    # volume[a][b][t, j, i] = integral of d_a psi_j * d_b phi_i
    volume = np.einsum("tq,tqja,tqib->abtji", weights, grads, grads)

    triangles, b_values, b_grads, b_weights, normals = _boundary_tabulation(vspace, 2 * vspace.degree)
    # boundary[a][b][e, j, i] = integral of psi_j * n_b * d_a phi_i
    boundary = np.einsum("eq,eqj,eb,eqia->abeji", b_weights, b_values, normals, b_grads)
    boundary_dofs = cell_dofs[triangles]

    parts = []
    for c, component in enumerate(mspace.components):
        offset = c * n
        for r, s in _ENTRIES[component]:
            # (div tau) . Du picks d_s psi d_r u, tau n . Du picks psi n_s d_r u
            parts.append(scatter(cell_dofs, volume[s, r], row_offset=offset))
            parts.append(
                scatter(boundary_dofs, -boundary[r, s], row_offset=offset, col_dofs=boundary_dofs)
            )

    rows, cols, vals = (np.concatenate(arrays) for arrays in zip(*parts))
    full = SparseMatrix.from_triplets(rows, cols, vals, (mspace.ndof, n))
    logger.debug("Assembled divergence block %dx%d, nnz=%d", *full.shape, full.nnz)
    return full.columns(vspace.interior_dofs), full.columns(vspace.boundary_dofs)


@dataclass(frozen=True)
class MixedOperator:
    """
    The linear part of the mixed system on one mesh.

    Attributes:
        vspace: Scalar space V_h.
        mspace: Matrix space Sigma_h over the same mesh and degree.
        mass: M, Frobenius mass matrix on Sigma_h.
        b_int: Divergence block acting on interior V_h dofs.
        b_bdry: Divergence block acting on boundary V_h dofs.
        quad: Rule used for all volume integrals.
    """

    vspace: ScalarSpace
    mspace: MatrixSpace
    mass: SparseMatrix
    b_int: SparseMatrix
    b_bdry: SparseMatrix
    quad: QuadratureRule

    @classmethod
    def assemble(cls, vspace: ScalarSpace, quad: QuadratureRule) -> "MixedOperator":
        mspace = MatrixSpace(vspace)
        b_int, b_bdry = assemble_divgrad(vspace, mspace, quad)
        return cls(vspace, mspace, assemble_mass(mspace, quad), b_int, b_bdry, quad)

    @cached_property
    def mass_solver(self) -> FactorizedMatrix:
        return FactorizedMatrix(self.mass)

    def divgrad(self, u: FieldVector) -> np.ndarray:
        """B_int u_int + B_bdry u_bdry."""
        values = u.values
        return self.b_int @ values[self.vspace.interior_dofs] + self.b_bdry @ values[self.vspace.boundary_dofs]

    def hessian_defect(self, u: FieldVector, sigma: FieldVector) -> np.ndarray:
        """M sigma + B u, zero exactly when (u, sigma) lies in Z_h."""
        return self.mass @ sigma.values + self.divgrad(u)


def discrete_hessian(op: MixedOperator, u: FieldVector) -> FieldVector:
    """
    The discrete Hessian of u: sigma with M sigma = -(B_int u_int + B_bdry u_bdry).

    Raises:
        FactorizationError: If the mass matrix cannot be factorized.
    """
    return FieldVector(op.mspace, op.mass_solver.solve(-op.divgrad(u)))


def assemble_stiffness(space: ScalarSpace, quad: QuadratureRule) -> SparseMatrix:
    """Gradient-gradient matrix (D phi_j, D phi_i)."""
    _, grads = space.tabulate(quad)
    weights = space.integration_weights(quad)
    local = np.einsum("tq,tqia,tqja->tij", weights, grads, grads)
    return SparseMatrix.from_triplets(*scatter(space.cell_dofs, local), (space.ndof, space.ndof))


def sample_at_quadrature(space: ScalarSpace, func, quad: QuadratureRule, name: str = "f") -> np.ndarray:
    """func at the physical quadrature points, (nt, nq)."""
    points = space.map_points(quad.points)
    return evaluate_scalar(func, points[..., 0], points[..., 1], name=name)


def load_from_samples(space: ScalarSpace, samples: np.ndarray, quad: QuadratureRule) -> np.ndarray:
    """Integrals of a sampled density against every basis function."""
    values, _ = space.tabulate(quad)
    local = np.einsum("tq,qi->ti", space.integration_weights(quad) * samples, values)
    return np.bincount(space.cell_dofs.ravel(), weights=local.ravel(), minlength=space.ndof)


def assemble_load(space: ScalarSpace, func, quad: QuadratureRule, name: str = "f") -> np.ndarray:
    """Load vector (func, phi_i) over all dofs."""
    return load_from_samples(space, sample_at_quadrature(space, func, quad, name), quad)
