"""Harness app configuration."""

from django.apps import AppConfig


class HarnessConfig(AppConfig):
    """Configuration for error measurement, studies and the command line."""

    name = "apps.harness"
    verbose_name = "Convergence harness"
