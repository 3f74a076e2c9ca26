"""Shared exception types for the decision engine."""

__all__ = [
    "EngineError",
    "DomainError",
    "CostError",
    "NoDataError",
    "NotFoundError",
    "ConflictError",
]


class EngineError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EngineError, ValueError):
    """An input lies outside its documented domain (bad probability, bad index, ...)."""


class CostError(EngineError):
    """A computation was refused because it would exceed a hard cost guard."""


class NoDataError(EngineError):
    """A quantity was requested before any observation supports it."""


class NotFoundError(EngineError, KeyError):
    """The referenced session does not exist."""


class ConflictError(EngineError):
    """The operation is not allowed in the session's current state."""
