"""Structured error types for the gas-and-ball toolkit."""
from __future__ import annotations

from enum import Enum
from typing import Any, Optional


class ErrorType(Enum):
    """Classification of failures, mapped onto process exit codes."""

    USAGE = "usage"
    NUMERICAL = "numerical"
    VALIDATION = "validation"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    ErrorType.USAGE: 1,
    ErrorType.NUMERICAL: 2,
    ErrorType.VALIDATION: 3,
}

# Distinct status for `solve` when the ball rests at the bottom.
EXIT_NOT_FLOATING = 4


class GasBallError(Exception):
    """Base class for every error raised by the toolkit."""

    def __init__(self, message: str, error_type: ErrorType = ErrorType.NUMERICAL) -> None:
        super().__init__(message)
        self.message = message
        self.error_type = error_type

    @property
    def exit_code(self) -> int:
        return self.error_type.exit_code

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.message


class InvalidParameterError(GasBallError):
    """A physical parameter or function argument violates its domain."""

    def __init__(self, message: str) -> None:
        super().__init__(message, ErrorType.USAGE)


class ConfigError(GasBallError):
    """A run configuration file or flag could not be used."""

    def __init__(self, message: str) -> None:
        super().__init__(message, ErrorType.USAGE)


class OutOfRangeError(GasBallError):
    """A height lies outside [R, E/(Mg))."""

    def __init__(self, message: str) -> None:
        super().__init__(message, ErrorType.USAGE)


class NoConvergenceError(GasBallError):
    """An iterative solver failed to meet its tolerance."""


class DegenerateVarianceError(GasBallError):
    """The height variance q·u² − w vanished numerically."""


class GridTooCoarseError(GasBallError):
    """A density normalization is not stable under grid refinement."""


class NotFloatingError(GasBallError):
    """The floating condition fails; the ball rests at the bottom.

    ``resting`` carries the labelled resting solution (y = R, λ = λ_*).
    """

    def __init__(self, message: str, resting: Optional[Any] = None) -> None:
        super().__init__(message, ErrorType.NUMERICAL)
        self.resting = resting


class EnergyExhaustedError(GasBallError):
    """The potential energy leaves no kinetic energy to distribute."""


class InfeasibleConstraintError(GasBallError):
    """No admissible configuration satisfying a constraint was found."""


class ModeMismatchError(GasBallError):
    """A reflection mode was requested for an object that cannot use it."""

    def __init__(self, message: str) -> None:
        super().__init__(message, ErrorType.USAGE)


class EventOrderError(GasBallError):
    """An event was processed out of order or a collision was skipped."""


class StalledSimulationError(GasBallError):
    """Too many events occurred within a vanishing time window."""


class InsufficientDataError(GasBallError):
    """Too few samples to compute a statistic."""


class ValidationFailure(GasBallError):
    """One or more acceptance criteria failed."""

    def __init__(self, message: str) -> None:
        super().__init__(message, ErrorType.VALIDATION)


__all__ = [
    "ConfigError",
    "DegenerateVarianceError",
    "EXIT_NOT_FLOATING",
    "EnergyExhaustedError",
    "ErrorType",
    "EventOrderError",
    "GasBallError",
    "GridTooCoarseError",
    "InfeasibleConstraintError",
    "InsufficientDataError",
    "InvalidParameterError",
    "ModeMismatchError",
    "NoConvergenceError",
    "NotFloatingError",
    "OutOfRangeError",
    "StalledSimulationError",
    "ValidationFailure",
]
