"""Continued fractions, fast Khintchine level sets and their dimensions."""

from .errors import DiagnosticFailure, DomainError, ResourceError

__version__ = "0.1.0"

__all__ = ["DomainError", "ResourceError", "DiagnosticFailure", "__version__"]
