"""
Settings for unattended batch runs (long convergence studies).
"""

from decouple import config

from .base import *  # noqa: F401, F403

DEBUG = False

# Newton progress is noise in batch logs; keep warnings and errors only
LOGGING["loggers"]["apps"]["level"] = config(  # noqa: F405
    "MA_LOG_LEVEL", default="WARNING"
)
