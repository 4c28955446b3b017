"""Tests for Newton starting iterates."""

import numpy as np
import pytest

from apps.assembly.operators import MixedOperator
from apps.elements.quadrature import make_quadrature
from apps.meshes.mesh import build_structured_mesh
from apps.problems.catalog import catalog
from apps.solver.initial import initial_guess
from apps.solver.transforms import ConvexifyConfig
from apps.spaces.spaces import ScalarSpace, interpolate
from mafem.exceptions import InvalidArgumentError, InvalidDataError


@pytest.fixture
def op():
    space = ScalarSpace(build_structured_mesh((0.0, 0.0, 1.0, 1.0), 4), 2)
    return MixedOperator.assemble(space, make_quadrature(6))


def test_poisson_surrogate_recovers_paraboloid(op):
    problem = catalog("quadratic")
    u0, sigma0 = initial_guess(problem, op, "poisson")
    expected = interpolate(op.vspace, problem.exact_u)
    np.testing.assert_allclose(u0.values, expected.values, atol=1e-12)
    xx, xy, yy = op.mspace.split(sigma0.values)
    np.testing.assert_allclose(xx, 1.0, atol=1e-9)
    np.testing.assert_allclose(xy, 0.0, atol=1e-9)
    np.testing.assert_allclose(yy, 1.0, atol=1e-9)


def test_zero_data_allowed(op):
    problem = catalog("quadratic").with_changes(f=lambda x, y: 0.0 * x)
    u0, _ = initial_guess(problem, op, "poisson")
    # harmonic with the paraboloid's boundary values
    assert np.all(np.isfinite(u0.values))


def test_negative_data_rejected(op):
    problem = catalog("quadratic").with_changes(f=lambda x, y: x - 0.5)
    with pytest.raises(InvalidDataError):
        initial_guess(problem, op, "poisson")


def test_interpolant_strategy_keeps_boundary_data(op):
    problem = catalog("quadratic").with_changes(initial_u=lambda x, y: x**2 + y**2)
    u0, _ = initial_guess(problem, op, "interpolant")
    g = interpolate(op.vspace, problem.g)
    boundary = op.vspace.boundary_dofs
    np.testing.assert_array_equal(u0.values[boundary], g.values[boundary])
    interior = op.vspace.interior_dofs
    x, y = op.vspace.dof_coordinates[interior].T
    np.testing.assert_allclose(u0.values[interior], x**2 + y**2)


def test_convexified_start(op):
    problem = catalog("quadratic")
    u0, sigma0 = initial_guess(problem, op, "poisson", ConvexifyConfig(0.5, (0.5, 0.5)))
    boundary = op.vspace.boundary_dofs
    np.testing.assert_allclose(u0.values[boundary], interpolate(op.vspace, problem.g).values[boundary])
    assert np.all(np.isfinite(sigma0.values))


def test_unknown_strategy(op):
    with pytest.raises(InvalidArgumentError):
        initial_guess(catalog("quadratic"), op, "random")
