"""
Exception hierarchy shared by all apps.

Management commands map these onto exit codes: argument and catalog
errors are usage errors, everything raised while solving is a solver
failure.
"""


class MongeAmpereError(Exception):
    """Base class for every error raised by the project."""


class InvalidArgumentError(MongeAmpereError, ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedDegreeError(MongeAmpereError):
    """Requested polynomial exactness is beyond the implemented rules."""


class EvaluationError(MongeAmpereError):
    """A user-supplied function returned a non-finite value."""

    def __init__(self, message: str, point: tuple[float, float] | None = None):
        super().__init__(message)
        self.point = point


class InvalidDataError(MongeAmpereError):
    """Problem data is incompatible with the requested operation."""


class FactorizationError(MongeAmpereError):
    """A sparse LU factorization failed or produced a vanishing pivot."""

    def __init__(self, message: str, pivot: int | None = None, report=None):
        super().__init__(message)
        self.pivot = pivot
        self.report = report


class DivergenceError(MongeAmpereError):
    """Newton's method kept increasing the residual."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class UnknownProblemError(MongeAmpereError, KeyError):
    """The problem label is not in the catalog."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class RateUnavailableError(MongeAmpereError):
    """Too few converged refinement levels to fit a rate."""

    def __init__(self, message: str, table=None):
        super().__init__(message)
        self.table = table


class ArtifactWriteError(MongeAmpereError):
    """An output file could not be written."""

    def __init__(self, message: str, path=None):
        super().__init__(message)
        self.path = path
