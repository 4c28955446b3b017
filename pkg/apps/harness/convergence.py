"""
Refinement studies and single reproducible runs.

A study solves one problem on a sequence of meshes with halving h and
fits observed rates as least-squares slopes of log(error) against
log(h) over the converged levels. The last-pair rate is reported next
to it.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.conf import settings

from apps.assembly.exports import write_sparse
from apps.assembly.nonlinear import assemble_jacobian_block, check_convexity
from apps.meshes.io import write_mesh
from apps.meshes.mesh import (
    Mesh,
    build_polygon_mesh,
    build_structured_mesh,
    refine_uniform,
    select_interior,
)
from apps.problems.catalog import ProblemSpec, catalog
from apps.solver.driver import SolveResult, solve_problem
from apps.solver.newton import NewtonConfig, NewtonReport
from apps.solver.transforms import ConvexifyConfig
from apps.spaces.exports import write_field
from apps.spaces.spaces import ScalarSpace
from mafem.exceptions import (
    ArtifactWriteError,
    DivergenceError,
    EvaluationError,
    FactorizationError,
    InvalidArgumentError,
    InvalidDataError,
    RateUnavailableError,
)

from .exports.tables import write_table
from .exports.plotdata import write_vertex_values
from .norms import ErrorReport, error_norms

logger = logging.getLogger(__name__)

ERROR_COLUMNS = ("err_u_L2", "err_u_H1", "err_sigma_L2", "err_u_sup_interior")
EXACT_THRESHOLD = 1e-8
SOLVER_FAILURES = (FactorizationError, DivergenceError, InvalidDataError, EvaluationError)


def fit_rate(h, errors) -> float:
    """
    Least-squares slope of log(error) against log(h).

    Raises:
        RateUnavailableError: With fewer than two points or a nonpositive error.
    """
    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if h.size < 2:
        raise RateUnavailableError(f"A rate needs at least 2 levels, got {h.size}")
    if np.any(errors <= 0) or np.any(h <= 0):
        raise RateUnavailableError("Rates need positive errors and mesh sizes")
    slope, _ = np.polyfit(np.log(h), np.log(errors), 1)
    return float(slope)


@dataclass
class ConvergenceTable:
    """
    ErrorReports of successive refinements, coarsest first.

    Raises:
        InvalidArgumentError: If mesh sizes do not strictly decrease.
    """

    label: str
    degree: int
    reports: list[ErrorReport] = field(default_factory=list)

    def __post_init__(self) -> None:
        h = [report.mesh_size_h for report in self.reports]
        if any(b >= a for a, b in zip(h, h[1:])):
            raise InvalidArgumentError(f"Mesh sizes must strictly decrease, got {h}")

    @property
    def converged_reports(self) -> list[ErrorReport]:
        return [report for report in self.reports if report.converged]

    def column(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        """(h, error) over converged rows where the error is available."""
        rows = [r for r in self.converged_reports if getattr(r, name) is not None]
        return (
            np.array([r.mesh_size_h for r in rows]),
            np.array([getattr(r, name) for r in rows]),
        )

    def is_exact(self, name: str) -> bool:
        """True when every available converged error of a column is at roundoff level."""
        _, errors = self.column(name)
        return errors.size > 0 and bool(np.all(errors <= EXACT_THRESHOLD))

    def _require_rows(self) -> None:
        if len(self.converged_reports) < 2:
            raise RateUnavailableError(
                f"{self.label}: {len(self.converged_reports)} converged levels, need 2",
                table=self,
            )

    def rates(self) -> dict[str, float | None]:
        """Least-squares rates; None for exact or unavailable columns."""
        self._require_rows()
        rates = {}
        for name in ERROR_COLUMNS:
            h, errors = self.column(name)
            if self.is_exact(name) or h.size < 2:
                rates[name] = None
            else:
                rates[name] = fit_rate(h, errors)
        return rates

    def last_pair_rates(self) -> dict[str, float | None]:
        self._require_rows()
        rates = {}
        for name in ERROR_COLUMNS:
            h, errors = self.column(name)
            if self.is_exact(name) or h.size < 2:
                rates[name] = None
            else:
                rates[name] = fit_rate(h[-2:], errors[-2:])
        return rates


def mesh_sequence(problem: ProblemSpec, n: int, levels: int, base_mesh: Mesh | None = None) -> list[Mesh]:
    """
    Meshes with halving h.

    A given base mesh is refined uniformly; rectangles get structured
    n x n grids with n doubling; other polygons get the centroid fan
    refined about log2(n) times, plus one round per level.
    """
    if base_mesh is not None:
        meshes = [base_mesh]
        for _ in range(levels - 1):
            meshes.append(refine_uniform(meshes[-1]))
        return meshes
    if problem.rectangle is not None:
        return [build_structured_mesh(problem.rectangle, n * 2**i) for i in range(levels)]
    rounds = round(math.log2(n)) if n > 1 else 0
    return [build_polygon_mesh(problem.domain, rounds + i) for i in range(levels)]


def _resolve(problem: ProblemSpec | str) -> ProblemSpec:
    return catalog(problem) if isinstance(problem, str) else problem


@dataclass(frozen=True)
class StudyOptions:
    """Solver knobs shared by every level of a study or case."""

    config: NewtonConfig | None = None
    quad_degree: int | None = None
    beta: float | None = None
    convexify: ConvexifyConfig | None = None
    interior_margin: float = 0.0
    dump_matrices: bool = False


def measure(problem: ProblemSpec, result: SolveResult, interior_margin: float = 0.0) -> ErrorReport:
    """
    ErrorReport of a finished solve, including the Newton observables.

    With a positive interior margin the smallest eigenvalue of sigma_h is
    also sampled on the interior region alone.
    """
    interior = select_interior(result.op.vspace.mesh, interior_margin)
    report = error_norms(
        result.u,
        result.sigma,
        problem.exact_u,
        problem.exact_hessian,
        quad=result.op.quad,
        interior=interior,
        exact_gradient=problem.exact_gradient,
    )
    report.newton_iters = result.report.iterations
    report.min_lambda1 = result.report.min_lambda1[-1]
    if interior_margin > 0 and not interior.empty:
        inner = check_convexity(result.op.mspace, result.sigma, result.op.quad, sorted(interior.selected_triangles))
        report.min_lambda1_interior = inner.min_lambda1
    report.converged = result.report.converged
    if not report.converged:
        report.failure = f"no convergence after {report.newton_iters} iterations"
    return report


def _failure_report(mesh: Mesh, degree: int, error: Exception) -> ErrorReport:
    ndof = ScalarSpace(mesh, degree).ndof
    report = ErrorReport(
        mesh_size_h=mesh.mesh_size_h, ndof_u=ndof, ndof_sigma=3 * ndof, converged=False, failure=str(error)
    )
    history = getattr(error, "report", None)
    if isinstance(history, NewtonReport) and history.residuals:
        report.newton_iters = history.iterations
        report.min_lambda1 = history.min_lambda1[-1]
    return report


def _solve_level(problem: ProblemSpec, mesh: Mesh, degree: int, options: StudyOptions) -> ErrorReport:
    try:
        result = solve_problem(
            problem,
            mesh,
            degree,
            options.config,
            options.quad_degree,
            options.beta,
            options.convexify,
        )
    except SOLVER_FAILURES as e:
        logger.warning("%s on %r failed: %s", problem.label, mesh, e)
        return _failure_report(mesh, degree, e)
    return measure(problem, result, options.interior_margin)


def run_convergence(
    problem: ProblemSpec | str,
    degree: int,
    levels: int,
    n: int | None = None,
    options: StudyOptions | None = None,
    base_mesh: Mesh | None = None,
    workers: int | None = None,
) -> ConvergenceTable:
    """
    Solve on successive refinements and tabulate the errors.

    Args:
        problem: ProblemSpec or catalog label.
        degree: Polynomial degree k >= 2.
        levels: Number of meshes, at least 2.
        n: Subdivisions of the coarsest mesh; settings.MA_DEFAULT_SUBDIVISIONS
            by default.
        options: Solver knobs.
        base_mesh: Coarsest mesh, refined uniformly per level.
        workers: Threads solving levels concurrently; settings.MA_WORKERS
            by default. Rows keep level order.

    Raises:
        InvalidArgumentError: If degree < 2 or levels < 2.
        RateUnavailableError: If fewer than 2 levels converged; the
            exception carries the table.
    """
    problem = _resolve(problem)
    if degree < 2:
        raise InvalidArgumentError(f"The mixed method needs degree >= 2, got {degree}")
    if levels < 2:
        raise InvalidArgumentError(f"A study needs at least 2 levels, got {levels}")
    n = n or getattr(settings, "MA_DEFAULT_SUBDIVISIONS", 4)
    workers = workers or getattr(settings, "MA_WORKERS", 1)
    options = options or StudyOptions()

    meshes = mesh_sequence(problem, n, levels, base_mesh)
    logger.info("Convergence study %s, P%d, %d levels, %d workers", problem.label, degree, levels, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(lambda mesh: _solve_level(problem, mesh, degree, options), meshes))

    table = ConvergenceTable(label=problem.label, degree=degree, reports=reports)
    table._require_rows()
    return table


@dataclass
class CaseOutcome:
    """Result of run_case: the errors, the solve and the files written."""

    report: ErrorReport
    result: SolveResult
    paths: dict[str, Path]


def run_case(
    problem: ProblemSpec | str,
    degree: int,
    n: int,
    output_dir: Path,
    options: StudyOptions | None = None,
    base_mesh: Mesh | None = None,
) -> CaseOutcome:
    """
    Solve once and write every artifact into output_dir.

    Files: newton.csv, u_h.txt, sigma_h.txt, u_h.dat (x y u_h at the
    vertices), mesh.txt and errors.csv. With options.dump_matrices the
    mass matrix and the Jacobian block at the final sigma_h go to
    mass.txt and jacobian.txt in coordinate format. On a solver failure
    newton.csv is still written when a history exists, then the error
    propagates.

    Raises:
        ArtifactWriteError: If the directory or a file cannot be written.
    """
    problem = _resolve(problem)
    options = options or StudyOptions()
    output_dir = Path(output_dir)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ArtifactWriteError(f"Could not create {output_dir}: {e}", path=output_dir) from e

    mesh = mesh_sequence(problem, n, 1, base_mesh)[0]
    newton_path = output_dir / "newton.csv"
    try:
        result = solve_problem(
            problem, mesh, degree, options.config, options.quad_degree, options.beta, options.convexify
        )
    except (FactorizationError, DivergenceError) as e:
        if e.report is not None:
            _write_text(newton_path, e.report.to_csv())
        raise

    report = measure(problem, result, options.interior_margin)
    paths = {
        "newton": _write_text(newton_path, result.report.to_csv()),
        "u_h": write_field(result.u, output_dir / "u_h.txt"),
        "sigma_h": write_field(result.sigma, output_dir / "sigma_h.txt"),
        "plot": write_vertex_values(result.u, output_dir / "u_h.dat"),
        "mesh": write_mesh(mesh, output_dir / "mesh.txt"),
        "errors": write_table([report], output_dir / "errors.csv"),
    }
    if options.dump_matrices:
        op = result.op
        jacobian = assemble_jacobian_block(op.vspace, op.mspace, result.sigma, op.quad)
        paths["mass"] = write_sparse(op.mass, output_dir / "mass.txt")
        paths["jacobian"] = write_sparse(jacobian, output_dir / "jacobian.txt")
    logger.info("Wrote %d artifacts for %s to %s", len(paths), problem.label, output_dir)
    return CaseOutcome(report=report, result=result, paths=paths)


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text)
    except OSError as e:
        raise ArtifactWriteError(f"Could not write {path}: {e}", path=path) from e
    return path
