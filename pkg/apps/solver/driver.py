"""One complete solve: assemble, initialize, iterate, undo transforms."""

import logging
from dataclasses import dataclass

from django.conf import settings

from apps.assembly.operators import MixedOperator
from apps.elements.quadrature import make_quadrature
from apps.meshes.mesh import Mesh
from apps.problems.catalog import ProblemSpec
from apps.problems.checks import bounds_check
from apps.spaces.spaces import FieldVector, ScalarSpace

from .initial import initial_guess
from .newton import NewtonConfig, NewtonReport, newton_solve
from .transforms import ConvexifyConfig, apply_rescaling, undo_rescaling

logger = logging.getLogger(__name__)


def quadrature_exactness(degree: int, override: int | None = None) -> int:
    """Exactness used for every volume integral: override, settings, or 3k."""
    if override is not None:
        return override
    configured = getattr(settings, "MA_QUAD_DEGREE", None)
    return configured if configured is not None else 3 * degree


@dataclass
class SolveResult:
    """
    Outcome of solve_problem.

    u and sigma solve the original (unscaled) problem; report holds the
    history of the scaled iteration.
    """

    problem: ProblemSpec
    op: MixedOperator
    report: NewtonReport
    u: FieldVector
    sigma: FieldVector


def solve_problem(
    problem: ProblemSpec,
    mesh: Mesh,
    degree: int,
    config: NewtonConfig | None = None,
    quad_degree: int | None = None,
    beta: float | None = None,
    convexify: ConvexifyConfig | None = None,
) -> SolveResult:
    """
    Solve det D^2 u = f on a mesh.

    Args:
        problem: Problem data, already regularized if wanted.
        mesh: Triangulation of the problem's domain.
        degree: Polynomial degree k.
        config: Newton controls; defaults from settings.
        quad_degree: Quadrature exactness override.
        beta: Solve for beta u and divide by beta afterwards.
        convexify: Added to the initial guess.

    Raises:
        FactorizationError, DivergenceError: From the Newton iteration.
    """
    config = config or NewtonConfig.from_settings()
    bounds_check(problem)

    scaled = apply_rescaling(problem, beta) if beta is not None else problem
    vspace = ScalarSpace(mesh, degree)
    op = MixedOperator.assemble(vspace, make_quadrature(quadrature_exactness(degree, quad_degree)))
    logger.info(
        "Solving %s with P%d on %r: %d + %d dofs",
        problem.label,
        degree,
        mesh,
        vspace.ndof,
        op.mspace.ndof,
    )

    u0, sigma0 = initial_guess(scaled, op, config.initialization, convexify)
    report = newton_solve(op, scaled, config, u0, sigma0)

    u, sigma = report.u, report.sigma
    if beta is not None:
        u, sigma = undo_rescaling(u, beta), undo_rescaling(sigma, beta)
    return SolveResult(problem=problem, op=op, report=report, u=u, sigma=sigma)
