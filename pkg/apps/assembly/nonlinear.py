"""
The determinant equation and its linearization.

Symmetric 2 x 2 fields are handled as (xx, xy, yy) component arrays;
det and cof are evaluated pointwise at quadrature points.
"""

import logging
from typing import NamedTuple

import numpy as np

from apps.elements.quadrature import QuadratureRule
from apps.spaces.spaces import FieldVector, MatrixSpace, ScalarSpace
from mafem.exceptions import InvalidArgumentError

from .operators import assemble_load, load_from_samples
from .sparse import SparseMatrix, scatter

logger = logging.getLogger(__name__)


def determinant(components: np.ndarray) -> np.ndarray:
    """det [[a, b], [b, c]] = a c - b^2 over the last axis."""
    a, b, c = np.moveaxis(components, -1, 0)
    return a * c - b * b


def cofactor(components: np.ndarray) -> np.ndarray:
    """cof [[a, b], [b, c]] = [[c, -b], [-b, a]], as components."""
    a, b, c = np.moveaxis(components, -1, 0)
    return np.stack((c, -b, a), axis=-1)


def frobenius(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """A : B for component arrays; the off-diagonal counts twice."""
    return left[..., 0] * right[..., 0] + 2.0 * left[..., 1] * right[..., 1] + left[..., 2] * right[..., 2]


def eigenvalues(components: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form (lambda_1, lambda_2) with lambda_1 <= lambda_2."""
    a, b, c = np.moveaxis(components, -1, 0)
    mean = 0.5 * (a + c)
    radius = np.hypot(0.5 * (a - c), b)
    return mean - radius, mean + radius


def _warn_exactness(space: ScalarSpace, quad: QuadratureRule) -> None:
    if quad.exactness_degree < 3 * space.degree:
        logger.warning(
            "Quadrature exactness %d under-integrates det terms of degree %d",
            quad.exactness_degree,
            3 * space.degree,
        )


def assemble_determinant(vspace: ScalarSpace, sigma: FieldVector, quad: QuadratureRule) -> np.ndarray:
    """(det sigma, phi_i) over all V_h dofs."""
    _warn_exactness(vspace, quad)
    det = determinant(sigma.space.evaluate(sigma.values, quad))
    return load_from_samples(vspace, det, quad)


def assemble_residual(vspace: ScalarSpace, sigma: FieldVector, f, quad: QuadratureRule) -> np.ndarray:
    """
    Residual of the determinant equation.

    Returns:
        (det sigma - f, v) for each interior basis function v, in the order
        of vspace.interior_dofs.

    Raises:
        EvaluationError: If f is not finite at a quadrature point.
    """
    full = assemble_determinant(vspace, sigma, quad) - assemble_load(vspace, f, quad)
    return full[vspace.interior_dofs]


def assemble_jacobian_block(
    vspace: ScalarSpace, mspace: MatrixSpace, sigma: FieldVector, quad: QuadratureRule
) -> SparseMatrix:
    """
    Derivative of the residual with respect to sigma.

    Entry (v, tau) is the integral of (cof sigma) : tau * v. Rows follow
    vspace.interior_dofs, columns are all Sigma_h dofs.
    """
    _warn_exactness(vspace, quad)
    values, _ = vspace.tabulate(quad)
    weights = vspace.integration_weights(quad)
    cof = cofactor(mspace.evaluate(sigma.values, quad))
    n = vspace.ndof

    parts = []
    for c, factor in enumerate((1.0, 2.0, 1.0)):
        local = np.einsum("tq,qi,qj->tij", factor * weights * cof[..., c], values, values)
        parts.append(
            scatter(vspace.cell_dofs, local, col_dofs=mspace.scalar.cell_dofs + c * n)
        )
    rows, cols, vals = (np.concatenate(arrays) for arrays in zip(*parts))
    full = SparseMatrix.from_triplets(rows, cols, vals, (n, mspace.ndof))
    return full.rows(vspace.interior_dofs)


class ConvexityReport(NamedTuple):
    """Eigenvalue extremes of a matrix field over sampled points."""

    min_lambda1: float
    max_lambda2: float
    nonconvex_triangles: tuple[int, ...]

    @property
    def convex(self) -> bool:
        return not self.nonconvex_triangles


def check_convexity(
    mspace: MatrixSpace, sigma: FieldVector, quad: QuadratureRule, triangles=None
) -> ConvexityReport:
    """
    Sample the eigenvalues of sigma at every quadrature point.

    Args:
        triangles: Restrict sampling to these triangle indices; all
            triangles when omitted.

    Returns:
        ConvexityReport with the smallest lambda_1, the largest lambda_2
        and the triangles where lambda_1 <= 0 somewhere.
    """
    lambda1, lambda2 = eigenvalues(mspace.evaluate(sigma.values, quad))
    selected = np.arange(lambda1.shape[0]) if triangles is None else np.asarray(triangles, dtype=np.int64)
    if selected.size == 0:
        raise InvalidArgumentError("No triangles to sample")
    lambda1, lambda2 = lambda1[selected], lambda2[selected]
    nonconvex = selected[np.any(lambda1 <= 0.0, axis=1)]
    return ConvexityReport(
        float(lambda1.min()), float(lambda2.max()), tuple(int(t) for t in nonconvex)
    )
