"""Shared exception types."""


class DomainError(ValueError):
    """Arguments outside the mathematical domain of an operation."""


class DivergenceError(DomainError):
    """A series was requested at a point where it diverges."""


class ResourceLimitError(RuntimeError):
    """An enumeration or iteration exceeded its configured budget."""
