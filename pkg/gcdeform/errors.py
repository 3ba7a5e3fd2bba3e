"""
Exception hierarchy for gcdeform.

Checks whose answer may legitimately be "no" return result objects instead of
raising; the classes below cover violated preconditions only.
"""

from typing import Optional


class GCDeformError(ValueError):
    """Base class for every error raised by the library."""


class ContextMismatchError(GCDeformError):
    """Charts, variable contexts or Artin algebras of two operands differ."""


class DomainError(GCDeformError):
    """An input lies outside the supported domain of an operation."""


class NotClosedError(DomainError):
    """A closed differential form was required."""


class IncompatibleError(GCDeformError):
    """A brane or deformation is not compatible with the GC structure."""


class InsolubleError(GCDeformError):
    """A linear reduction has no solution on the given cover."""

    def __init__(self, message: str, simplex: Optional[tuple] = None):
        super().__init__(message)
        self.simplex = simplex


class ComplexError(GCDeformError):
    """A constructed differential does not square to zero, or im is not in ker."""


class ConsistencyError(GCDeformError):
    """Two independently computed sides of an equivalence disagree."""


class NotHomomorphismError(GCDeformError):
    """A one-parameter family is not of the form t -> exp(t x)."""


class SchemaError(GCDeformError):
    """A model file violates the expected schema; ``path`` is a JSON pointer."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path or "/"
        self.reason = message


class ConfigError(GCDeformError):
    """An environment setting could not be parsed."""
