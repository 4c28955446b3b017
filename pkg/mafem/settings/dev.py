"""
Development-specific Django settings.
"""

from .base import *  # noqa: F401, F403

DEBUG = True

SECRET_KEY = "mafem-dev-only-key"

LOGGING["loggers"]["apps"]["level"] = "DEBUG"  # noqa: F405
