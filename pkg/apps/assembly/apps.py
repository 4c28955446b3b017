"""Assembly app configuration."""

from django.apps import AppConfig


class AssemblyConfig(AppConfig):
    """Configuration for sparse operator assembly."""

    name = "apps.assembly"
    verbose_name = "Operator assembly"
