"""Tests for global spaces, interpolation and field evaluation."""

import numpy as np
import pytest

from apps.meshes.mesh import build_polygon_mesh, build_structured_mesh
from apps.spaces.spaces import (
    FieldVector,
    MatrixSpace,
    ScalarSpace,
    eval_field,
    interpolate,
    interpolate_matrix,
    set_boundary_values,
)
from mafem.exceptions import EvaluationError, InvalidArgumentError

UNIT_SQUARE = (0.0, 0.0, 1.0, 1.0)


def random_barycentric(rng, count):
    bary = rng.dirichlet(np.ones(3), size=count)
    return bary


def sample_field(space, field, rng, count=100):
    """Evaluate a scalar field at random points; returns (points, values)."""
    triangles = rng.integers(space.mesh.num_triangles, size=count)
    points, values = [], []
    for t, bary in zip(triangles, random_barycentric(rng, count)):
        corners = space.mesh.vertices[space.mesh.triangles[t]]
        points.append(bary @ corners)
        values.append(eval_field(space, field, int(t), bary)[0])
    return np.array(points), np.array(values)


@pytest.mark.parametrize("degree", [1, 2, 3, 4])
def test_dof_count_formula(degree):
    mesh = build_structured_mesh(UNIT_SQUARE, 3)
    space = ScalarSpace(mesh, degree)
    expected = (
        mesh.num_vertices
        + (degree - 1) * mesh.num_edges
        + (degree - 1) * (degree - 2) // 2 * mesh.num_triangles
    )
    assert space.ndof == expected
    assert MatrixSpace(space).ndof == 3 * expected
    # every dof is used by some triangle
    assert np.array_equal(np.unique(space.cell_dofs), np.arange(space.ndof))


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_boundary_dofs_are_on_the_boundary(degree):
    mesh = build_structured_mesh(UNIT_SQUARE, 3)
    space = ScalarSpace(mesh, degree)
    x, y = space.dof_coordinates.T
    on_boundary = (
        (np.abs(x) < 1e-12) | (np.abs(x - 1) < 1e-12) | (np.abs(y) < 1e-12) | (np.abs(y - 1) < 1e-12)
    )
    assert np.array_equal(np.nonzero(on_boundary)[0], space.boundary_dofs)
    assert space.boundary_dofs.size + space.interior_dofs.size == space.ndof


@pytest.mark.parametrize("degree", [2, 3])
def test_shared_edge_dofs_have_one_location(degree):
    mesh = build_polygon_mesh([[0.0, 0.0], [1.0, 0.0], [1.2, 0.8], [0.3, 1.0]], refinements=1)
    space = ScalarSpace(mesh, degree)
    coords = space.map_points(space.element.nodes)
    for t in range(mesh.num_triangles):
        np.testing.assert_allclose(
            space.dof_coordinates[space.cell_dofs[t]], coords[t], atol=1e-14
        )


def test_continuity_across_interior_edges():
    rng = np.random.default_rng(3)
    mesh = build_structured_mesh(UNIT_SQUARE, 2)
    space = ScalarSpace(mesh, 3)
    field = FieldVector(space, rng.standard_normal(space.ndof))

    for e, (t0, t1) in enumerate(mesh.edge_triangles):
        if t1 < 0:
            continue
        a, b = mesh.edges[e]
        for s in np.linspace(0.1, 0.9, 5):
            values = []
            for t in (t0, t1):
                bary = np.zeros(3)
                local = list(mesh.triangles[t])
                bary[local.index(a)] = 1 - s
                bary[local.index(b)] = s
                values.append(eval_field(space, field, int(t), bary)[0])
            assert values[0] == pytest.approx(values[1], abs=1e-10)


def test_interpolate_constant():
    space = ScalarSpace(build_structured_mesh(UNIT_SQUARE, 2), 2)
    field = interpolate(space, lambda x, y: 1.0)
    np.testing.assert_array_equal(field.values, np.ones(space.ndof))


def test_interpolate_linear_gives_vertex_coordinates():
    mesh = build_structured_mesh(UNIT_SQUARE, 1)
    space = ScalarSpace(mesh, 1)
    field = interpolate(space, lambda x, y: x)
    np.testing.assert_array_equal(field.values, mesh.vertices[:, 0])


@pytest.mark.parametrize("degree", [1, 2, 3, 4])
def test_interpolation_reproduces_polynomials(degree):
    rng = np.random.default_rng(degree)
    coefficients = rng.standard_normal((degree + 1, degree + 1))

    def poly(x, y):
        return sum(
            coefficients[p, q] * x**p * y**q
            for p in range(degree + 1)
            for q in range(degree + 1 - p)
        )

    mesh = build_polygon_mesh([[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.5]], refinements=1)
    space = ScalarSpace(mesh, degree)
    points, values = sample_field(space, interpolate(space, poly), rng)
    np.testing.assert_allclose(values, poly(points[:, 0], points[:, 1]), atol=1e-10)


def test_interpolate_non_finite_names_point():
    space = ScalarSpace(build_structured_mesh(UNIT_SQUARE, 1), 1)
    with pytest.raises(EvaluationError) as excinfo:
        interpolate(space, lambda x, y: 1.0 / x)
    assert excinfo.value.point[0] == 0.0


def test_interpolate_matrix_identity_and_hessian():
    space = MatrixSpace(ScalarSpace(build_structured_mesh(UNIT_SQUARE, 2), 2))
    identity = interpolate_matrix(space, lambda x, y: [[1.0, 0.0], [0.0, 1.0]])
    xx, xy, yy = space.split(identity.values)
    assert np.all(xx == 1) and np.all(xy == 0) and np.all(yy == 1)

    hessian = interpolate_matrix(space, lambda x, y: [[2.0, 1.0], [1.0, 0.0]])
    xx, xy, yy = space.split(hessian.values)
    assert np.all(xx == 2) and np.all(xy == 1) and np.all(yy == 0)


def test_interpolate_matrix_radial_hessian_at_origin():
    scalar = ScalarSpace(build_structured_mesh(UNIT_SQUARE, 2), 2)
    space = MatrixSpace(scalar)

    def hessian(x, y):
        e = np.exp((x**2 + y**2) / 2)
        return [[e * (1 + x**2), e * x * y], [e * x * y, e * (1 + y**2)]]

    field = interpolate_matrix(space, hessian)
    origin = int(np.flatnonzero(np.all(scalar.dof_coordinates == 0.0, axis=1))[0])
    xx, xy, yy = space.split(field.values)[:, origin]
    assert (xx, xy, yy) == (1.0, 0.0, 1.0)


class TestEvalField:
    def setup_method(self):
        self.mesh = build_structured_mesh(UNIT_SQUARE, 2)
        self.space = ScalarSpace(self.mesh, 2)

    def test_constant(self):
        field = interpolate(self.space, lambda x, y: 5.0)
        value, gradient = eval_field(self.space, field, 3, (0.2, 0.3, 0.5))
        assert value == pytest.approx(5.0, abs=1e-13)
        np.testing.assert_allclose(gradient, 0.0, atol=1e-12)

    def test_linear_at_centroids(self):
        field = interpolate(self.space, lambda x, y: x)
        for t in range(self.mesh.num_triangles):
            centroid = self.mesh.vertices[self.mesh.triangles[t]].mean(axis=0)
            value, gradient = eval_field(self.space, field, t, np.full(3, 1 / 3))
            assert value == pytest.approx(centroid[0], abs=1e-13)
            np.testing.assert_allclose(gradient, [1.0, 0.0], atol=1e-12)

    def test_matrix_identity(self):
        space = MatrixSpace(self.space)
        field = interpolate_matrix(space, lambda x, y: [[1.0, 0.0], [0.0, 1.0]])
        value, gradient = eval_field(space, field, 5, (0.6, 0.1, 0.3))
        np.testing.assert_allclose(value, np.eye(2), atol=1e-13)
        np.testing.assert_allclose(gradient, 0.0, atol=1e-12)

    def test_triangle_out_of_range(self):
        field = interpolate(self.space, lambda x, y: x)
        with pytest.raises(InvalidArgumentError):
            eval_field(self.space, field, self.mesh.num_triangles, (1.0, 0.0, 0.0))


class TestBoundaryValues:
    def setup_method(self):
        self.space = ScalarSpace(build_structured_mesh(UNIT_SQUARE, 3), 2)
        rng = np.random.default_rng(0)
        self.field = FieldVector(self.space, rng.standard_normal(self.space.ndof))

    def test_zero(self):
        result = set_boundary_values(self.space, self.field, lambda x, y: 0.0)
        assert np.all(result.values[self.space.boundary_dofs] == 0.0)
        np.testing.assert_array_equal(
            result.values[self.space.interior_dofs], self.field.values[self.space.interior_dofs]
        )

    def test_coordinate_sum(self):
        result = set_boundary_values(self.space, self.field, lambda x, y: x + y)
        coords = self.space.dof_coordinates[self.space.boundary_dofs]
        np.testing.assert_array_equal(result.values[self.space.boundary_dofs], coords.sum(axis=1))

    def test_idempotent(self):
        once = set_boundary_values(self.space, self.field, lambda x, y: x * y)
        twice = set_boundary_values(self.space, once, lambda x, y: x * y)
        np.testing.assert_array_equal(once.values, twice.values)

    def test_input_not_mutated(self):
        before = self.field.values.copy()
        set_boundary_values(self.space, self.field, lambda x, y: 1.0)
        np.testing.assert_array_equal(self.field.values, before)


def test_field_vector_length_checked():
    space = ScalarSpace(build_structured_mesh(UNIT_SQUARE, 1), 1)
    with pytest.raises(InvalidArgumentError):
        FieldVector(space, np.zeros(space.ndof + 1))
