"""Elements app configuration."""

from django.apps import AppConfig


class ElementsConfig(AppConfig):
    """Configuration for reference elements and quadrature."""

    name = "apps.elements"
    verbose_name = "Reference elements"
