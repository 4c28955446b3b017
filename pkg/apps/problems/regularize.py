"""
Regularized data f_m and interior computational domains.

Clipping caps f at a ceiling, which makes unbounded data usable while
keeping evaluation pointwise. Optional mollification convolves the
clipped data with a C-infinity bump, evaluated by a fixed quadrature
grid on the bump's support. Shrinking moves the domain boundary inward,
away from boundary singularities, with g as the Dirichlet data on the
new boundary.
"""

import logging
from functools import lru_cache

import numpy as np

from mafem.exceptions import InvalidArgumentError

from .catalog import ProblemSpec, _xy

logger = logging.getLogger(__name__)

MOLLIFIER_GRID = 15


@lru_cache(maxsize=8)
def bump_stencil(radius: float, grid: int = MOLLIFIER_GRID) -> tuple[np.ndarray, np.ndarray]:
    """
    Offsets and weights of the normalized bump exp(-1 / (1 - |z|^2 / r^2)).

    Returns:
        offsets (m, 2) inside the open disk and weights (m,) summing to 1.
    """
    ticks = (np.arange(grid) + 0.5) / grid * 2.0 - 1.0
    zx, zy = np.meshgrid(ticks, ticks, indexing="ij")
    rho2 = (zx**2 + zy**2).ravel()
    inside = rho2 < 1.0
    weights = np.exp(-1.0 / (1.0 - rho2[inside]))
    offsets = radius * np.column_stack((zx.ravel()[inside], zy.ravel()[inside]))
    return offsets, weights / weights.sum()


def _clipped(f, ceiling: float):
    def clipped(x, y):
        x, y = _xy(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.minimum(f(x, y), ceiling)

    return clipped


def _mollified(f, radius: float):
    offsets, weights = bump_stencil(radius)

    def mollified(x, y):
        x, y = _xy(x, y)
        samples = f(x[..., None] - offsets[:, 0], y[..., None] - offsets[:, 1])
        return samples @ weights

    return mollified


def regularize(spec: ProblemSpec, clip: float | None = None, mollify_radius: float | None = None) -> ProblemSpec:
    """
    Replace f by min(f, clip), optionally mollified.

    The boundary data and the exact solution are kept; the exact solution
    stays the reference for interior error measurement.

    Raises:
        InvalidArgumentError: If the ceiling or the radius is not positive.
    """
    if clip is not None and not clip > 0:
        raise InvalidArgumentError(f"Clip ceiling must be positive, got {clip}")
    if mollify_radius is not None and not mollify_radius > 0:
        raise InvalidArgumentError(f"Mollification radius must be positive, got {mollify_radius}")

    f = spec.f
    if clip is not None:
        f = _clipped(f, clip)
    if mollify_radius is not None:
        f = _mollified(f, mollify_radius)
    logger.debug("Regularized %s: clip=%s mollify=%s", spec.label, clip, mollify_radius)
    return spec.with_changes(
        f=f,
        clip=clip if clip is not None else spec.clip,
        mollify_radius=mollify_radius if mollify_radius is not None else spec.mollify_radius,
    )


def shrink_domain(spec: ProblemSpec, margin: float) -> ProblemSpec:
    """
    Restrict the problem to its domain inset by margin.

    Every edge of the convex polygon moves inward by margin. f, g and the
    exact solution are kept, so g is the Dirichlet data on the new
    boundary and errors are measured against the same exact solution.

    Raises:
        InvalidArgumentError: If margin is not positive or leaves no
            polygon.
    """
    if not margin > 0:
        raise InvalidArgumentError(f"Shrink margin must be positive, got {margin}")
    polygon = spec.domain
    edges = np.roll(polygon, -1, axis=0) - polygon
    normals = np.column_stack((edges[:, 1], -edges[:, 0])) / np.hypot(edges[:, 0], edges[:, 1])[:, None]
    # vertex i joins edge i - 1 and edge i
    before = np.roll(normals, 1, axis=0)
    cosines = np.sum(before * normals, axis=1)
    inset = polygon - margin * (before + normals) / (1.0 + cosines)[:, None]

    inset_edges = np.roll(inset, -1, axis=0) - inset
    if np.any(np.sum(inset_edges * edges, axis=1) <= 0):
        raise InvalidArgumentError(f"Margin {margin} leaves no domain of {spec.label}")
    logger.debug("Shrunk %s by %s", spec.label, margin)
    return spec.with_changes(domain=inset, shrink=margin + (spec.shrink or 0.0))
