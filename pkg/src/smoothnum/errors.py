"""Exception types shared across the package."""


class SmoothnumError(Exception):
    """Base class for all package errors."""


class DomainError(SmoothnumError, ValueError):
    """An argument lies outside the range where the operation is defined."""


class HypothesisViolation(DomainError):
    """Inputs break a hypothesis of the statement being tested (e.g. p | q => p < y')."""


class CapacityError(SmoothnumError, MemoryError):
    """A request exceeds the configured memory or enumeration budget."""
