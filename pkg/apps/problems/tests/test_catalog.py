"""Tests for the benchmark catalog."""

import numpy as np
import pytest

from apps.problems.catalog import LABELS, catalog
from mafem.exceptions import UnknownProblemError

SMOOTH = ["quadratic", "smooth-radial", "boundary-singular"]


def interior_points(count=100, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 0.95, size=(count, 2)).T


@pytest.mark.parametrize("label", SMOOTH)
def test_exact_hessian_matches_f(label):
    spec = catalog(label)
    x, y = interior_points()
    (hxx, hxy), (_, hyy) = spec.exact_hessian(x, y)
    det = np.asarray(hxx) * np.asarray(hyy) - np.asarray(hxy) ** 2
    np.testing.assert_allclose(det, spec.f(x, y), rtol=1e-8)


@pytest.mark.parametrize("label", SMOOTH)
def test_exact_gradient_matches_solution(label):
    spec = catalog(label)
    x, y = interior_points(seed=1)
    step = 1e-6
    ux, uy = spec.exact_gradient(x, y)
    fd_x = (spec.exact_u(x + step, y) - spec.exact_u(x - step, y)) / (2 * step)
    fd_y = (spec.exact_u(x, y + step) - spec.exact_u(x, y - step)) / (2 * step)
    np.testing.assert_allclose(ux, fd_x, atol=1e-6)
    np.testing.assert_allclose(uy, fd_y, atol=1e-6)


@pytest.mark.parametrize("label", LABELS)
def test_boundary_data_matches_solution(label):
    spec = catalog(label)
    assert spec.rectangle == (0.0, 0.0, 1.0, 1.0)
    if spec.has_exact_solution:
        x, y = interior_points(seed=2)
        np.testing.assert_array_equal(spec.g(x, y), spec.exact_u(x, y))


def test_known_values():
    assert catalog("quadratic").f(0.3, 0.7) == 1.0
    assert catalog("boundary-singular").f(0.0, 0.0) == pytest.approx(0.5)
    assert catalog("smooth-radial").f(1.0, 1.0) == pytest.approx(3 * np.e**2)
    degenerate = catalog("degenerate")
    assert degenerate.f(0.5, 0.55) == pytest.approx(1e-3)
    assert degenerate.f(0.9, 0.9) == 1.0
    assert not degenerate.has_exact_solution


def test_boundary_singular_is_unbounded_at_corner():
    assert np.isposinf(catalog("boundary-singular").f(np.array(1.0), np.array(1.0)))


def test_unknown_label():
    with pytest.raises(UnknownProblemError, match="quadratic"):
        catalog("cubic")
