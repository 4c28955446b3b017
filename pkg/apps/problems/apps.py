"""Problems app configuration."""

from django.apps import AppConfig


class ProblemsConfig(AppConfig):
    """Configuration for the benchmark problem catalog."""

    name = "apps.problems"
    verbose_name = "Benchmark problems"
