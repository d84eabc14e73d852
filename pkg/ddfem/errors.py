"""Exception hierarchy shared by all ddfem subpackages."""

from typing import Any

EXIT_USER_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


class DdfemError(Exception):
    """
    Base class for structured ddfem errors.

    Args:
        message: Human readable description.
        details: Optional machine readable context (offending point, known names, ...).
    """

    exit_code: int = EXIT_USER_ERROR

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"{self.message} ({extra})"


class GeometryError(DdfemError, ValueError):
    """Invalid SDF construction or evaluation."""


class BoundaryError(DdfemError, ValueError):
    """Invalid boundary map or unresolvable boundary segment."""


class ModelError(DdfemError, ValueError):
    """PDE model violates its contract."""


class TransformError(DdfemError, ValueError):
    """A diffuse domain transformation cannot be applied."""


class RegistryError(DdfemError, KeyError):
    """Transformer or problem registry lookup failed."""

    def __str__(self) -> str:
        return DdfemError.__str__(self)


class ConfigError(DdfemError, ValueError):
    """Scene file or command line settings are invalid."""


class MeshError(DdfemError, ValueError):
    """Mesh construction or filtering failed."""


class NumericalError(DdfemError, ArithmeticError):
    """A coefficient produced non-finite values."""

    exit_code = EXIT_NUMERICAL_FAILURE


class SolverError(DdfemError, RuntimeError):
    """An iterative solver did not converge."""

    exit_code = EXIT_NUMERICAL_FAILURE
