"""Solver app configuration."""

from django.apps import AppConfig


class SolverConfig(AppConfig):
    """Configuration for the linear and Newton solvers."""

    name = "apps.solver"
    verbose_name = "Solvers"
