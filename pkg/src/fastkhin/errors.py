"""Exception types shared across the package.

The CLI maps each class to a distinct exit status.
"""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured size or precision cap."""


class DiagnosticFailure(RuntimeError):
    """A finite-horizon diagnostic did not pass."""
