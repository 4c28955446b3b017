"""Tests for the Newton iteration and the end-to-end solve."""

import numpy as np
import pytest

from apps.assembly.operators import MixedOperator
from apps.elements.quadrature import make_quadrature
from apps.meshes.mesh import build_structured_mesh
from apps.problems.catalog import catalog
from apps.problems.regularize import regularize, shrink_domain
from apps.solver.driver import solve_problem
from apps.solver.initial import initial_guess
from apps.solver.newton import NewtonConfig, NewtonReport, newton_solve
from apps.spaces.spaces import FieldVector, ScalarSpace, interpolate, interpolate_matrix
from mafem.exceptions import DivergenceError, FactorizationError, InvalidArgumentError

UNIT_SQUARE = (0.0, 0.0, 1.0, 1.0)


def paraboloid_start(x, y):
    return 0.5 * (x**2 + y**2) + 0.05 * np.sin(np.pi * x) * np.sin(np.pi * y)


def assemble(n, degree=2):
    space = ScalarSpace(build_structured_mesh(UNIT_SQUARE, n), degree)
    return MixedOperator.assemble(space, make_quadrature(3 * degree))


def superlinear(residuals):
    r = residuals[-3:]
    return r[2] <= 10 * r[1] ** 2 / r[0]


class TestQuadratic:
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_exact_from_poisson_start(self, n):
        problem = catalog("quadratic")
        result = solve_problem(problem, build_structured_mesh(UNIT_SQUARE, n), 2, NewtonConfig())
        report = result.report
        assert report.converged
        assert report.iterations <= 3
        exact = interpolate(result.op.vspace, problem.exact_u)
        assert np.max(np.abs(result.u.values - exact.values)) <= 1e-8
        blocks = result.op.mspace.split(result.sigma.values)
        identity = np.broadcast_to([[1.0], [0.0], [1.0]], blocks.shape)
        np.testing.assert_allclose(blocks, identity, atol=1e-8)

    def test_perturbed_start_converges_quadratically(self):
        op = assemble(4)
        problem = catalog("quadratic").with_changes(initial_u=paraboloid_start)
        u0, sigma0 = initial_guess(problem, op, "interpolant")
        report = newton_solve(op, problem, NewtonConfig(), u0, sigma0)
        assert report.converged
        assert 2 <= report.iterations <= 8
        assert len(report.residuals) == report.iterations + 1
        assert superlinear(report.residuals)
        exact = interpolate(op.vspace, problem.exact_u)
        assert np.max(np.abs(report.u.values - exact.values)) <= 1e-8
        # the Hessian constraint is linear and solved exactly by every step
        assert np.max(np.abs(op.hessian_defect(report.u, report.sigma))) <= 1e-9

    def test_full_steps(self):
        op = assemble(4)
        problem = catalog("quadratic").with_changes(initial_u=paraboloid_start)
        u0, sigma0 = initial_guess(problem, op, "interpolant")
        report = newton_solve(op, problem, NewtonConfig(damping="full"), u0, sigma0)
        assert report.converged
        assert set(report.halvings) == {0}

    def test_deterministic_history(self):
        op = assemble(4)
        problem = catalog("quadratic").with_changes(initial_u=paraboloid_start)
        histories = []
        for _ in range(2):
            u0, sigma0 = initial_guess(problem, op, "interpolant")
            histories.append(newton_solve(op, problem, NewtonConfig(), u0, sigma0).to_csv())
        assert histories[0] == histories[1]

    def test_rescaling_round_trip(self):
        mesh = build_structured_mesh(UNIT_SQUARE, 4)
        problem = catalog("quadratic")
        direct = solve_problem(problem, mesh, 2, NewtonConfig())
        scaled = solve_problem(problem, mesh, 2, NewtonConfig(), beta=5.0)
        assert scaled.report.converged
        assert np.max(np.abs(scaled.u.values - direct.u.values)) <= 1e-8
        assert np.max(np.abs(scaled.sigma.values - direct.sigma.values)) <= 1e-8


def test_smooth_radial_stays_convex():
    result = solve_problem(catalog("smooth-radial"), build_structured_mesh(UNIT_SQUARE, 8), 2, NewtonConfig())
    report = result.report
    assert report.converged
    assert all(lam > 0 for lam in report.min_lambda1[1:])
    if report.iterations >= 2:
        assert superlinear(report.residuals)


def test_boundary_singular_on_inset_domain():
    problem = shrink_domain(regularize(catalog("boundary-singular"), clip=100.0), 0.25)
    result = solve_problem(problem, build_structured_mesh(problem.rectangle, 4), 2, NewtonConfig())
    report = result.report
    assert report.converged
    assert report.min_lambda1[-1] > 0


def test_iteration_cap_reports_not_converged():
    op = assemble(4)
    problem = catalog("smooth-radial")
    report = newton_solve(op, problem, NewtonConfig(max_iterations=1, tolerance=1e-300))
    assert not report.converged
    assert report.iterations == 1


def test_degenerate_data_never_returns_stale_flag():
    problem = catalog("degenerate")
    try:
        report = solve_problem(problem, build_structured_mesh(UNIT_SQUARE, 4), 2, NewtonConfig()).report
    except (DivergenceError, FactorizationError) as e:
        assert e.report is not None
    else:
        assert report.converged == (report.final_residual <= report.tolerance)


def test_singular_jacobian_carries_report():
    op = assemble(2)
    problem = catalog("quadratic")
    u0 = interpolate(op.vspace, problem.g)
    zero = interpolate_matrix(op.mspace, lambda x, y: [[0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(FactorizationError) as excinfo:
        newton_solve(op, problem, NewtonConfig(), u0, zero)
    assert isinstance(excinfo.value.report, NewtonReport)
    assert excinfo.value.report.iterations == 0


def test_csv_layout():
    report = NewtonReport()
    space = ScalarSpace(build_structured_mesh(UNIT_SQUARE, 1), 1)
    field = FieldVector(space, np.zeros(space.ndof))
    report.record(field, field, 0.5, 1.0, 0)
    report.record(field, field, 0.25, 1.5, 2)
    assert report.to_csv().splitlines() == [
        "iter,residual,min_lambda1,damping_halvings",
        "0,0.5,1.0,0",
        "1,0.25,1.5,2",
    ]


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        NewtonConfig(tolerance=0.0)
    with pytest.raises(InvalidArgumentError):
        NewtonConfig(max_iterations=0)
    with pytest.raises(InvalidArgumentError):
        NewtonConfig(damping="trust-region")
    assert NewtonConfig().tolerance_for(400) == pytest.approx(2e-9)


def test_config_from_settings(settings):
    settings.MA_NEWTON_MAX_ITER = 7
    settings.MA_NEWTON_DAMPING = "full"
    config = NewtonConfig.from_settings(max_halvings=3, tolerance=None)
    assert (config.max_iterations, config.damping, config.max_halvings) == (7, "full", 3)
