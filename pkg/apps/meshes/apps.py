"""Meshes app configuration."""

from django.apps import AppConfig


class MeshesConfig(AppConfig):
    """Configuration for the triangulation application."""

    name = "apps.meshes"
    verbose_name = "Meshes"
