"""
Exception hierarchy shared by every numerical module.

Rate functions never raise for unattainable arguments; they return an
infinite ``RateEval`` instead. The classes below are reserved for invalid
input, exhausted resources and genuine solver failures.
"""

from typing import Any


class AnnealedLDPError(Exception):
    """Base class for all errors raised by annealed_ldp."""


class WeightValidationError(AnnealedLDPError, ValueError):
    """Invalid atoms, probabilities or per-type counts."""


class DomainError(AnnealedLDPError, ValueError):
    """Argument outside the domain of an operation."""


class SolverError(AnnealedLDPError, RuntimeError):
    """A bracketed solver failed to converge."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{key}={value!r}" for key, value in self.diagnostics.items())
        return f"{base} ({details})"


class ResourceLimitError(AnnealedLDPError):
    """An exact computation would exceed a configured size cap."""


class DivergenceError(AnnealedLDPError):
    """A quantity diverges at the requested parameters."""


class InvalidMixtureError(AnnealedLDPError):
    """The degree mixture is not a probability law."""
