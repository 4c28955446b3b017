"""
Error norms against an exact solution.

All norms are broken: squared differences are integrated triangle by
triangle with quadrature and summed. The matrix norm is Frobenius, so
the off-diagonal difference counts twice.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np

from apps.assembly.nonlinear import frobenius
from apps.elements.quadrature import QuadratureRule, make_quadrature
from apps.meshes.mesh import InteriorRegion
from apps.spaces.functions import evaluate_matrix, evaluate_scalar, evaluate_vector
from apps.spaces.spaces import FieldVector

logger = logging.getLogger(__name__)

@dataclass
class ErrorReport:
    """
    Errors and solver observables of one solve.

    Error fields are None when no exact solution is available, never 0.
    """

    mesh_size_h: float
    ndof_u: int
    ndof_sigma: int
    err_u_L2: float | None = None
    err_u_H1: float | None = None
    err_u_H1_semi: float | None = None
    err_sigma_L2: float | None = None
    err_u_sup_interior: float | None = None
    newton_iters: int | None = None
    min_lambda1: float | None = None
    min_lambda1_interior: float | None = None
    converged: bool = True
    failure: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def error_norms(
    u_h: FieldVector,
    sigma_h: FieldVector,
    exact_u,
    exact_hessian,
    quad: QuadratureRule | None = None,
    interior: InteriorRegion | None = None,
    exact_gradient=None,
) -> ErrorReport:
    """
    Measure u_h and sigma_h against the exact solution.

    Args:
        u_h: Discrete scalar solution.
        sigma_h: Discrete Hessian field.
        exact_u: Exact solution, or None.
        exact_hessian: Exact Hessian, or None.
        quad: Rule for all integrals; exactness 2(k + 1) by default.
        interior: Triangles sampled for the interior sup error; all
            triangles when omitted.
        exact_gradient: Exact gradient as a pair (u_x, u_y); the H1
            errors stay None without it.

    Returns:
        ErrorReport with mesh size and dof counts filled in.
    """
    vspace, mspace = u_h.space, sigma_h.space
    degree = vspace.degree
    report = ErrorReport(
        mesh_size_h=vspace.mesh.mesh_size_h, ndof_u=vspace.ndof, ndof_sigma=mspace.ndof
    )

    needed = 2 * (degree + 1)
    if quad is None:
        quad = make_quadrature(needed)
    elif quad.exactness_degree < needed:
        logger.warning(
            "Error quadrature exactness %d is below %d; norms are approximate",
            quad.exactness_degree,
            needed,
        )

    points = vspace.map_points(quad.points)
    x, y = points[..., 0], points[..., 1]
    weights = vspace.integration_weights(quad)

    if exact_u is not None:
        values, grads = vspace.evaluate(u_h.values, quad)
        diff = values - evaluate_scalar(exact_u, x, y, name="exact solution")
        l2_sq = float(np.sum(weights * diff**2))
        report.err_u_L2 = float(np.sqrt(l2_sq))

        if exact_gradient is not None:
            grad_diff = grads - evaluate_vector(exact_gradient, x, y, name="exact gradient")
            semi_sq = float(np.sum(weights[..., None] * grad_diff**2))
            report.err_u_H1_semi = float(np.sqrt(semi_sq))
            report.err_u_H1 = float(np.sqrt(l2_sq + semi_sq))

        selected = _interior_triangles(vspace.mesh.num_triangles, interior)
        if selected.size:
            report.err_u_sup_interior = float(np.max(np.abs(diff[selected])))
        else:
            logger.warning("Interior region is empty; no interior sup error")

    if exact_hessian is not None:
        sigma_diff = mspace.evaluate(sigma_h.values, quad) - evaluate_matrix(
            exact_hessian, x, y, name="exact Hessian"
        )
        report.err_sigma_L2 = float(np.sqrt(np.sum(weights * frobenius(sigma_diff, sigma_diff))))
    return report


def _interior_triangles(num_triangles: int, interior: InteriorRegion | None) -> np.ndarray:
    if interior is None:
        return np.arange(num_triangles)
    return np.array(sorted(interior.selected_triangles), dtype=np.int64)
