"""
Starting iterates for Newton's method.

The default solves the Poisson surrogate Laplace(w) = 2 sqrt(f), w = g:
if D^2 u = c I then det D^2 u = c^2 = f and the trace is 2 sqrt(f).
"""

import logging

import numpy as np
from django.conf import settings

from apps.assembly.operators import (
    MixedOperator,
    assemble_stiffness,
    discrete_hessian,
    load_from_samples,
    sample_at_quadrature,
)
from apps.problems.catalog import ProblemSpec
from apps.spaces.spaces import FieldVector, interpolate, set_boundary_values
from mafem.exceptions import InvalidArgumentError, InvalidDataError

from .linear import solve_linear
from .transforms import ConvexifyConfig, apply_convexification

logger = logging.getLogger(__name__)

STRATEGIES = ("poisson", "interpolant")


def poisson_surrogate(op: MixedOperator, problem: ProblemSpec) -> FieldVector:
    """
    Finite element solution of Laplace(w) = 2 sqrt(f) with w = g on the boundary.

    Raises:
        InvalidDataError: If f is negative at a quadrature point.
    """
    space, quad = op.vspace, op.quad
    f_values = sample_at_quadrature(space, problem.f, quad)
    if np.any(f_values < 0.0):
        worst = float(f_values.min())
        raise InvalidDataError(f"f takes the negative value {worst:.3e}; sqrt(f) is undefined")

    stiffness = assemble_stiffness(space, quad)
    load = load_from_samples(space, 2.0 * np.sqrt(f_values), quad)

    w = set_boundary_values(space, FieldVector(space, np.zeros(space.ndof)), problem.g)
    interior, boundary = space.interior_dofs, space.boundary_dofs
    rhs = -load[interior] - stiffness.columns(boundary).rows(interior) @ w.values[boundary]
    w.values[interior] = solve_linear(stiffness.rows(interior).columns(interior), rhs)
    return w


def initial_guess(
    problem: ProblemSpec,
    op: MixedOperator,
    strategy: str | None = None,
    convexify: ConvexifyConfig | None = None,
) -> tuple[FieldVector, FieldVector]:
    """
    Build (u0, sigma0) with sigma0 the discrete Hessian of u0.

    Args:
        problem: Problem data.
        op: Assembled operator on the target mesh.
        strategy: "poisson" or "interpolant"; defaults to
            settings.MA_INITIALIZATION. The interpolant strategy uses
            problem.initial_u, or g when none is given.
        convexify: Optional eps |x - x0|^2 added before the boundary
            values are reset.

    Raises:
        InvalidArgumentError: On an unknown strategy.
        InvalidDataError: If the Poisson surrogate meets negative f.
    """
    strategy = strategy or getattr(settings, "MA_INITIALIZATION", "poisson")
    if strategy not in STRATEGIES:
        raise InvalidArgumentError(f"Unknown initialization {strategy!r}; choose from {', '.join(STRATEGIES)}")

    if strategy == "poisson":
        u0 = poisson_surrogate(op, problem)
    else:
        u0 = interpolate(op.vspace, problem.initial_u or problem.g)
        u0 = set_boundary_values(op.vspace, u0, problem.g)

    if convexify is not None:
        u0 = set_boundary_values(op.vspace, apply_convexification(u0, convexify), problem.g)

    sigma0 = discrete_hessian(op, u0)
    logger.debug("Initial guess from %s strategy for %s", strategy, problem.label)
    return u0, sigma0
