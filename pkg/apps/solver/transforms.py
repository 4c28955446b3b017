"""
Problem and solution transforms used to condition the nonlinear solve.

Rescaling uses det D^2(beta u) = beta^2 det D^2 u in two dimensions:
solving for beta u with data (beta^2 f, beta g) and dividing by beta
recovers u. Convexification adds eps |x - x0|^2, which shifts the
discrete Hessian by 2 eps I.
"""

from dataclasses import dataclass

import numpy as np

from apps.problems.catalog import ProblemSpec
from apps.spaces.spaces import FieldVector, interpolate
from mafem.exceptions import InvalidArgumentError

ANCHOR_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RescaleConfig:
    beta: float

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise InvalidArgumentError(f"Scale factor must be positive, got {self.beta}")


@dataclass(frozen=True)
class ConvexifyConfig:
    epsilon: float
    anchor: tuple[float, float]

    def __post_init__(self) -> None:
        if not self.epsilon >= 0:
            raise InvalidArgumentError(f"Convexification magnitude must be >= 0, got {self.epsilon}")


def _scaled(func, factor: float):
    if func is None:
        return None

    def scaled(x, y):
        return factor * np.asarray(func(x, y), dtype=float)

    return scaled


def _scaled_pair(func, factor: float):
    if func is None:
        return None

    def scaled(x, y):
        first, second = func(x, y)
        return factor * np.asarray(first, dtype=float), factor * np.asarray(second, dtype=float)

    return scaled


def _scaled_matrix(func, factor: float):
    if func is None:
        return None

    def scaled(x, y):
        m = func(x, y)
        return [[np.multiply(factor, m[i][j]) for j in range(2)] for i in range(2)]

    return scaled


def apply_rescaling(problem: ProblemSpec, beta: float) -> ProblemSpec:
    """
    The problem solved by beta u.

    Returns:
        ProblemSpec with f' = beta^2 f, g' = beta g and every known exact
        quantity scaled by beta.

    Raises:
        InvalidArgumentError: If beta <= 0.
    """
    beta = RescaleConfig(beta).beta
    if beta == 1.0:
        return problem
    return problem.with_changes(
        f=_scaled(problem.f, beta**2),
        g=_scaled(problem.g, beta),
        exact_u=_scaled(problem.exact_u, beta),
        exact_gradient=_scaled_pair(problem.exact_gradient, beta),
        exact_hessian=_scaled_matrix(problem.exact_hessian, beta),
        initial_u=_scaled(problem.initial_u, beta),
    )


def undo_rescaling(field: FieldVector, beta: float) -> FieldVector:
    """Divide a solution of the rescaled problem by beta."""
    beta = RescaleConfig(beta).beta
    return FieldVector(field.space, field.values / beta)


def apply_convexification(u: FieldVector, cfg: ConvexifyConfig) -> FieldVector:
    """
    Add the interpolant of eps |x - x0|^2 to u.

    Raises:
        InvalidArgumentError: If the anchor is not an interior point of the mesh.
    """
    mesh = u.space.mesh
    if not mesh.contains(cfg.anchor):
        raise InvalidArgumentError(f"Convexification anchor {cfg.anchor} is outside the domain")
    if mesh.distance_to_boundary(cfg.anchor)[0] <= ANCHOR_TOLERANCE * mesh.mesh_size_h:
        raise InvalidArgumentError(f"Convexification anchor {cfg.anchor} lies on the boundary")
    if cfg.epsilon == 0:
        return u.copy()
    x0, y0 = cfg.anchor
    bump = interpolate(u.space, lambda x, y: cfg.epsilon * ((x - x0) ** 2 + (y - y0) ** 2))
    return FieldVector(u.space, u.values + bump.values)
