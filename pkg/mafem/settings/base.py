"""
Base Django settings for the Monge-Ampère mixed finite element project.

Settings common to all environments. Environment-specific settings
are in dev.py and prod.py.
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config("SECRET_KEY", default="")
DEBUG = config("DEBUG", default=False, cast=bool)

# Application definition
LOCAL_APPS = [
    "apps.meshes",
    "apps.elements",
    "apps.spaces",
    "apps.assembly",
    "apps.solver",
    "apps.problems",
    "apps.harness",
]

INSTALLED_APPS = LOCAL_APPS

# No persistence: the apps only compute and write artifacts to disk.
DATABASES = {}

USE_I18N = False
USE_TZ = True

# Discretization defaults
MA_DEFAULT_DEGREE = config("MA_DEFAULT_DEGREE", default=2, cast=int)
MA_DEFAULT_SUBDIVISIONS = config("MA_DEFAULT_SUBDIVISIONS", default=4, cast=int)
MA_DEFAULT_LEVELS = config("MA_DEFAULT_LEVELS", default=3, cast=int)

# Empty means "derive from the degree" (3k for nonlinear terms)
MA_QUAD_DEGREE = config(
    "MA_QUAD_DEGREE", default="", cast=lambda v: int(v) if v else None
)

# Newton solver
MA_NEWTON_TOL = config(
    "MA_NEWTON_TOL", default="", cast=lambda v: float(v) if v else None
)
MA_NEWTON_MAX_ITER = config("MA_NEWTON_MAX_ITER", default=50, cast=int)
MA_NEWTON_DAMPING = config("MA_NEWTON_DAMPING", default="linesearch")
MA_NEWTON_MAX_HALVINGS = config("MA_NEWTON_MAX_HALVINGS", default=8, cast=int)
MA_INITIALIZATION = config("MA_INITIALIZATION", default="poisson")

# Problem data checks
MA_DEGENERACY_RATIO = config("MA_DEGENERACY_RATIO", default=1e-2, cast=float)

# Harness
MA_WORKERS = config("MA_WORKERS", default=1, cast=int)
MA_OUTPUT_DIR = Path(config("MA_OUTPUT_DIR", default=str(BASE_DIR / "output")))
MA_LOG_LEVEL = config("MA_LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "apps": {
            "handlers": ["console"],
            "level": MA_LOG_LEVEL,
            "propagate": False,
        },
    },
}
