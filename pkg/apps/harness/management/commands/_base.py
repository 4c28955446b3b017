"""
Shared plumbing for the solver commands.

Exit codes: 0 on success, 1 on usage errors (bad arguments, unknown
problems), 2 when the solve itself fails.
"""

import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.harness.convergence import StudyOptions
from apps.harness.norms import ErrorReport
from apps.meshes.io import read_mesh
from apps.problems.catalog import LABELS, ProblemSpec, catalog
from apps.problems.expressions import load_problem_file
from apps.problems.regularize import regularize, shrink_domain
from apps.solver.initial import STRATEGIES
from apps.solver.newton import DAMPING_STRATEGIES, NewtonConfig
from apps.solver.transforms import ConvexifyConfig
from mafem.exceptions import (
    InvalidArgumentError,
    MongeAmpereError,
    UnknownProblemError,
    UnsupportedDegreeError,
)

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
SOLVER_FAILURE = 2
USAGE_ERRORS = (InvalidArgumentError, UnknownProblemError, UnsupportedDegreeError)


class HarnessCommand(BaseCommand):
    """Base for commands that set up and run a Monge-Ampere solve."""

    def run_from_argv(self, argv) -> None:
        # argparse exits with 2 on bad usage; 2 is reserved for solver failures
        self._called_from_command_line = True
        parser = self.create_parser(argv[0], argv[1])
        try:
            parser.parse_args(argv[2:])
        except SystemExit as e:
            raise SystemExit(USAGE_ERROR if e.code else 0) from None
        super().run_from_argv(argv)

    def add_arguments(self, parser) -> None:
        """Add command arguments."""
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--problem", help=f"Catalog label, one of {', '.join(LABELS)}")
        source.add_argument("--problem-file", type=Path, help="Custom problem in key = value form")

        parser.add_argument("--degree", type=int, help="Polynomial degree k")
        parser.add_argument("--n", type=int, help="Subdivisions per side of the coarsest mesh")
        parser.add_argument("--mesh-file", type=Path, help="Base mesh in the text mesh format")
        parser.add_argument("--quad-degree", type=int, help="Quadrature exactness override")
        parser.add_argument("--newton-tol", type=float, help="Residual tolerance")
        parser.add_argument("--newton-max", type=int, help="Iteration cap")
        parser.add_argument("--damping", choices=DAMPING_STRATEGIES, help="Newton step control")
        parser.add_argument("--init", choices=STRATEGIES, help="Initial guess strategy")
        parser.add_argument("--beta", type=float, help="Solve for beta*u and rescale back")
        parser.add_argument("--convexify-eps", type=float, help="Add eps*|x - x0|^2 to the initial guess")
        parser.add_argument(
            "--convexify-anchor",
            type=float,
            nargs=2,
            metavar=("X", "Y"),
            help="x0 for --convexify-eps; the domain's vertex mean by default",
        )
        parser.add_argument("--clip", type=float, help="Replace f by min(f, M)")
        parser.add_argument("--mollify", type=float, help="Mollify f with this radius")
        parser.add_argument("--shrink", type=float, help="Solve on the domain inset by this margin")
        parser.add_argument("--interior-margin", type=float, default=0.0, help="Margin of the interior sup error region")
        parser.add_argument("--out", type=Path, help="Output directory")

    def handle(self, *args, **options) -> None:
        """Run the command, mapping project errors onto exit codes."""
        try:
            self.run(options)
        except USAGE_ERRORS as e:
            raise CommandError(str(e), returncode=USAGE_ERROR) from e
        except MongeAmpereError as e:
            raise CommandError(str(e), returncode=SOLVER_FAILURE) from e

    def run(self, options: dict) -> None:
        raise NotImplementedError

    def resolve_problem(self, options: dict) -> ProblemSpec:
        if options["problem_file"] is not None:
            problem = load_problem_file(options["problem_file"])
        else:
            problem = catalog(options["problem"])
        if options["clip"] is not None or options["mollify"] is not None:
            problem = regularize(problem, options["clip"], options["mollify"])
        if options["shrink"] is not None:
            problem = shrink_domain(problem, options["shrink"])
        return problem

    def degree(self, options: dict) -> int:
        return options["degree"] or getattr(settings, "MA_DEFAULT_DEGREE", 2)

    def subdivisions(self, options: dict) -> int:
        n = options["n"] or getattr(settings, "MA_DEFAULT_SUBDIVISIONS", 4)
        if n < 1:
            raise InvalidArgumentError(f"--n must be positive, got {n}")
        return n

    def base_mesh(self, options: dict):
        return read_mesh(options["mesh_file"]) if options["mesh_file"] is not None else None

    def study_options(self, problem: ProblemSpec, options: dict) -> StudyOptions:
        convexify = None
        if options["convexify_eps"] is not None:
            anchor = options["convexify_anchor"] or problem.domain.mean(axis=0)
            convexify = ConvexifyConfig(options["convexify_eps"], tuple(float(v) for v in anchor))
        config = NewtonConfig.from_settings(
            tolerance=options["newton_tol"],
            max_iterations=options["newton_max"],
            damping=options["damping"],
            initialization=options["init"],
        )
        return StudyOptions(
            config=config,
            quad_degree=options["quad_degree"],
            beta=options["beta"],
            convexify=convexify,
            interior_margin=options["interior_margin"],
            dump_matrices=options.get("dump_matrices", False),
        )

    def output_dir(self, options: dict, name: str) -> Path:
        if options["out"] is not None:
            return options["out"]
        return Path(getattr(settings, "MA_OUTPUT_DIR", "output")) / name

    def write_report(self, report: ErrorReport) -> None:
        """Print one row of errors."""
        cells = [f"h={report.mesh_size_h:.4g}", f"ndof={report.ndof_u}+{report.ndof_sigma}"]
        for name in ("err_u_L2", "err_u_H1", "err_sigma_L2", "err_u_sup_interior"):
            value = getattr(report, name)
            cells.append(f"{name}={value:.3e}" if value is not None else f"{name}=n/a")
        if report.newton_iters is not None:
            cells.append(f"iters={report.newton_iters}")
        if report.min_lambda1 is not None:
            cells.append(f"min_lambda1={report.min_lambda1:.4g}")
        if report.min_lambda1_interior is not None:
            cells.append(f"min_lambda1_interior={report.min_lambda1_interior:.4g}")
        line = "  " + " ".join(cells)
        if report.converged:
            self.stdout.write(line)
        else:
            self.stdout.write(self.style.WARNING(f"{line} FAILED: {report.failure}"))
