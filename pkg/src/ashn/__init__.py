"""AshN two-qubit gate scheme: pulse compiler, verification and synthesis."""

from __future__ import annotations

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    AshnError,
    DomainError,
    ExtractionError,
    NumericError,
    PreconditionError,
    SectorViolationError,
)

__all__ = [
    "DEFAULT_TOL",
    "Tolerances",
    "AshnError",
    "DomainError",
    "ExtractionError",
    "NumericError",
    "PreconditionError",
    "SectorViolationError",
]

__version__ = "0.1.0"
