"""
Benchmark problems for det D^2 u = f, u = g on the boundary.

All functions take coordinate arrays and are pure. Catalog labels are
stable command-line names.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np

from apps.meshes.mesh import rectangle_polygon
from mafem.exceptions import UnknownProblemError

logger = logging.getLogger(__name__)

UNIT_SQUARE = (0.0, 0.0, 1.0, 1.0)

ScalarFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _xy(x, y) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """
    Data of one Dirichlet problem.

    Attributes:
        label: Catalog or file name of the problem.
        domain: Counterclockwise convex polygon, (m, 2).
        f: Right-hand side.
        g: Boundary data, evaluable on the whole closed domain.
        exact_u: Exact solution if known.
        exact_gradient: Gradient of exact_u as a pair (u_x, u_y).
        exact_hessian: Hessian of exact_u as a nested 2 x 2 sequence.
        initial_u: Convex function for interpolant initialization.
        clip: Ceiling applied to f, if regularized.
        mollify_radius: Bump radius used to smooth f, if any.
        shrink: Total inset of the domain from its original polygon, if any.
    """

    label: str
    domain: np.ndarray
    f: ScalarFunction
    g: ScalarFunction
    exact_u: ScalarFunction | None = None
    exact_gradient: Callable | None = None
    exact_hessian: Callable | None = None
    initial_u: ScalarFunction | None = None
    clip: float | None = None
    mollify_radius: float | None = None
    shrink: float | None = None

    def __post_init__(self) -> None:
        domain = np.array(self.domain, dtype=float).reshape(-1, 2)
        domain.setflags(write=False)
        object.__setattr__(self, "domain", domain)

    def __repr__(self) -> str:
        return f"ProblemSpec({self.label!r})"

    @property
    def has_exact_solution(self) -> bool:
        return self.exact_u is not None

    @property
    def rectangle(self) -> tuple[float, float, float, float] | None:
        """Bounds (xmin, ymin, xmax, ymax) when the domain is an axis-aligned rectangle."""
        if self.domain.shape[0] != 4:
            return None
        xmin, ymin = self.domain.min(axis=0)
        xmax, ymax = self.domain.max(axis=0)
        bounds = (float(xmin), float(ymin), float(xmax), float(ymax))
        if np.array_equal(self.domain, rectangle_polygon(bounds)):
            return bounds
        return None

    def with_changes(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)


def _quadratic() -> ProblemSpec:
    def u(x, y):
        x, y = _xy(x, y)
        return 0.5 * (x**2 + y**2)

    return ProblemSpec(
        label="quadratic",
        domain=rectangle_polygon(UNIT_SQUARE),
        f=lambda x, y: np.ones_like(_xy(x, y)[0]),
        g=u,
        exact_u=u,
        exact_gradient=lambda x, y: _xy(x, y),
        exact_hessian=lambda x, y: [[1.0, 0.0], [0.0, 1.0]],
    )


def _smooth_radial() -> ProblemSpec:
    def u(x, y):
        x, y = _xy(x, y)
        return np.exp(0.5 * (x**2 + y**2))

    def gradient(x, y):
        x, y = _xy(x, y)
        return u(x, y) * x, u(x, y) * y

    def hessian(x, y):
        x, y = _xy(x, y)
        e = u(x, y)
        return [[e * (1 + x**2), e * x * y], [e * x * y, e * (1 + y**2)]]

    def f(x, y):
        x, y = _xy(x, y)
        r2 = x**2 + y**2
        return (1 + r2) * np.exp(r2)

    return ProblemSpec(
        label="smooth-radial",
        domain=rectangle_polygon(UNIT_SQUARE),
        f=f,
        g=u,
        exact_u=u,
        exact_gradient=gradient,
        exact_hessian=hessian,
    )


def _boundary_singular() -> ProblemSpec:
    # u = -sqrt(2 - r^2) has an unbounded gradient at the corner (1, 1)
    def s(x, y):
        return 2.0 - x**2 - y**2

    def u(x, y):
        x, y = _xy(x, y)
        return -np.sqrt(s(x, y))

    def gradient(x, y):
        x, y = _xy(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.sqrt(s(x, y))
            return x / root, y / root

    def hessian(x, y):
        x, y = _xy(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            a = s(x, y) ** -0.5
            b = s(x, y) ** -1.5
            return [[a + b * x**2, b * x * y], [b * x * y, a + b * y**2]]

    def f(x, y):
        x, y = _xy(x, y)
        with np.errstate(divide="ignore"):
            return 2.0 / s(x, y) ** 2

    return ProblemSpec(
        label="boundary-singular",
        domain=rectangle_polygon(UNIT_SQUARE),
        f=f,
        g=u,
        exact_u=u,
        exact_gradient=gradient,
        exact_hessian=hessian,
    )


DEGENERATE_CENTER = (0.5, 0.5)
DEGENERATE_RADIUS = 0.2
DEGENERATE_FLOOR = 1e-3


def _degenerate() -> ProblemSpec:
    cx, cy = DEGENERATE_CENTER

    def f(x, y):
        x, y = _xy(x, y)
        inside = np.hypot(x - cx, y - cy) < DEGENERATE_RADIUS
        return np.where(inside, DEGENERATE_FLOOR, 1.0)

    def g(x, y):
        x, y = _xy(x, y)
        return 0.5 * ((x - cx) ** 2 + (y - cy) ** 2)

    return ProblemSpec(
        label="degenerate",
        domain=rectangle_polygon(UNIT_SQUARE),
        f=f,
        g=g,
    )


_BUILDERS = {
    "quadratic": _quadratic,
    "smooth-radial": _smooth_radial,
    "boundary-singular": _boundary_singular,
    "degenerate": _degenerate,
}

LABELS = tuple(_BUILDERS)


def catalog(label: str) -> ProblemSpec:
    """
    Look up a benchmark problem.

    Raises:
        UnknownProblemError: If the label is not in the catalog.
    """
    try:
        builder = _BUILDERS[label]
    except KeyError:
        raise UnknownProblemError(
            f"Unknown problem {label!r}; choose from {', '.join(LABELS)}"
        ) from None
    return builder()
