"""Self-check of the element: interpolation error under refinement."""

import logging

import numpy as np

from apps.spaces.functions import evaluate_scalar
from apps.spaces.spaces import ScalarSpace, interpolate

from .quadrature import make_quadrature
from .reference import ReferenceElement

logger = logging.getLogger(__name__)


def interpolation_error_probe(elem: ReferenceElement, func, meshes, quad=None) -> list[float]:
    """
    Sup-norm interpolation error on each mesh of a sequence.

    The error |func - I_h func| is sampled at the quadrature points of
    every triangle.

    Args:
        elem: Reference element fixing the degree.
        func: Smooth function of (x, y) arrays.
        meshes: Iterable of meshes, typically successive refinements.
        quad: Sampling rule; defaults to one of exactness 2k.

    Returns:
        One sup error per mesh.
    """
    quad = quad or make_quadrature(2 * elem.degree)
    errors = []
    for mesh in meshes:
        space = ScalarSpace(mesh, elem.degree)
        values, _ = space.evaluate(interpolate(space, func).values, quad)
        points = space.map_points(quad.points)
        exact = evaluate_scalar(func, points[..., 0], points[..., 1])
        errors.append(float(np.max(np.abs(values - exact))))
        logger.debug("P%d interpolation error h=%.4g: %.3e", elem.degree, mesh.mesh_size_h, errors[-1])
    return errors
