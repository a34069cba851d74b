"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AshnError(Exception):
    """Base class for all package errors."""


class PreconditionError(AshnError, ValueError):
    """An input violates a documented precondition (bad shape, not unitary, ...)."""


class DomainError(PreconditionError):
    """A scalar argument lies outside the mathematical domain of an operation."""


class NumericError(AshnError, ArithmeticError):
    """An iterative method failed to converge or produced an inconsistent result."""


class SectorViolationError(NumericError):
    """A sub-scheme was handed a target outside its polygon (indicates mis-dispatch)."""


class ExtractionError(NumericError):
    """Interaction coefficients could not be recovered from a spectrum."""
