"""
Management command to solve one Monge-Ampere problem and write its artifacts.

Usage:
    python manage.py solve --problem quadratic --degree 2 --n 4
    python manage.py solve --problem quadratic --n 2 --dump-matrices
    python manage.py solve --problem boundary-singular --clip 100 --shrink 0.25 --interior-margin 0.1
"""

from django.core.management.base import CommandError

from apps.harness.convergence import run_case

from ._base import SOLVER_FAILURE, HarnessCommand


class Command(HarnessCommand):
    """Solve on a single mesh."""

    help = "Solve det D^2 u = f once and write newton.csv, field dumps and errors.csv"

    def add_arguments(self, parser) -> None:
        """Add command arguments."""
        super().add_arguments(parser)
        parser.add_argument(
            "--dump-matrices",
            action="store_true",
            help="Also write mass.txt and jacobian.txt in coordinate format",
        )

    def run(self, options: dict) -> None:
        problem = self.resolve_problem(options)
        degree = self.degree(options)
        n = self.subdivisions(options)
        out = self.output_dir(options, f"{problem.label}-P{degree}-n{n}")

        self.stdout.write(f"Solving {problem.label} with P{degree}, n={n}...")
        outcome = run_case(
            problem,
            degree,
            n,
            out,
            self.study_options(problem, options),
            base_mesh=self.base_mesh(options),
        )
        self.write_report(outcome.report)

        if not outcome.report.converged:
            raise CommandError(outcome.report.failure, returncode=SOLVER_FAILURE)
        self.stdout.write(self.style.SUCCESS(f"Artifacts written to {out}"))
