"""Spaces app configuration."""

from django.apps import AppConfig


class SpacesConfig(AppConfig):
    """Configuration for global finite element spaces."""

    name = "apps.spaces"
    verbose_name = "Finite element spaces"
