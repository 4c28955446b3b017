"""Tests for the interpolation error probe."""

import numpy as np

from apps.elements.probes import interpolation_error_probe
from apps.elements.reference import get_reference_element
from apps.meshes.mesh import build_structured_mesh

UNIT_SQUARE = (0.0, 0.0, 1.0, 1.0)


def meshes(*subdivisions):
    return [build_structured_mesh(UNIT_SQUARE, n) for n in subdivisions]


def test_linear_reproduced():
    errors = interpolation_error_probe(
        get_reference_element(1), lambda x, y: 2 * x - 3 * y + 1, meshes(1, 2, 4)
    )
    assert max(errors) <= 1e-12


def test_quadratic_reproduced():
    errors = interpolation_error_probe(
        get_reference_element(2), lambda x, y: x**2 - x * y + 3 * y**2, meshes(2, 4)
    )
    assert max(errors) <= 1e-12


def test_smooth_function_rate():
    errors = interpolation_error_probe(
        get_reference_element(2), lambda x, y: np.sin(x + y), meshes(8, 16)
    )
    assert 0.8 * 8 <= errors[0] / errors[1] <= 1.2 * 8
