"""
Management command to run a refinement study.

Usage:
    python manage.py converge --problem smooth-radial --degree 2 --n 4 --levels 4
"""

import logging

from django.conf import settings
from django.core.management.base import CommandError

from apps.harness.convergence import ERROR_COLUMNS, run_convergence
from apps.harness.exports.chart import write_convergence_chart
from apps.harness.exports.tables import write_table
from mafem.exceptions import RateUnavailableError

from ._base import SOLVER_FAILURE, HarnessCommand

logger = logging.getLogger(__name__)


class Command(HarnessCommand):
    """Solve on successive refinements and fit convergence rates."""

    help = "Run a convergence study and write convergence.csv and convergence.png"

    def add_arguments(self, parser) -> None:
        """Add command arguments."""
        super().add_arguments(parser)
        parser.add_argument("--levels", type=int, help="Number of refinement levels")
        parser.add_argument("--workers", type=int, help="Levels solved concurrently")

    def run(self, options: dict) -> None:
        problem = self.resolve_problem(options)
        degree = self.degree(options)
        n = self.subdivisions(options)
        levels = options["levels"] or getattr(settings, "MA_DEFAULT_LEVELS", 3)
        out = self.output_dir(options, f"{problem.label}-P{degree}")
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CommandError(f"Could not create {out}: {e}", returncode=SOLVER_FAILURE) from e

        self.stdout.write(f"Convergence study {problem.label}, P{degree}, {levels} levels from n={n}...")
        try:
            table = run_convergence(
                problem,
                degree,
                levels,
                n,
                self.study_options(problem, options),
                base_mesh=self.base_mesh(options),
                workers=options["workers"],
            )
        except RateUnavailableError as e:
            if e.table is not None:
                for report in e.table.reports:
                    self.write_report(report)
                write_table(e.table.reports, out / "convergence.csv")
            raise

        for report in table.reports:
            self.write_report(report)
        csv_path = write_table(table.reports, out / "convergence.csv")
        write_convergence_chart(table, out / "convergence.png")

        rates, last_pair = table.rates(), table.last_pair_rates()
        for name in ERROR_COLUMNS:
            if table.is_exact(name):
                self.stdout.write(f"  {name}: exact")
            elif rates[name] is None:
                self.stdout.write(f"  {name}: n/a")
            else:
                self.stdout.write(f"  {name}: rate {rates[name]:.3f} (last pair {last_pair[name]:.3f})")
        self.stdout.write(self.style.SUCCESS(f"Table written to {csv_path}"))
