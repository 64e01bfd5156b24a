"""Exception hierarchy shared by the spectral POVM modules."""

from __future__ import annotations

from typing import Optional


class SpectralPovmError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SpectralPovmError, ValueError):
    """Raised when a physical parameter violates an operation's precondition."""

    def __init__(self, parameter: str, value: object, reason: str) -> None:
        super().__init__(f"{parameter}={value!r}: {reason}")
        self.parameter = parameter
        self.value = value


class UnitarityError(DomainError):
    """Raised when a transmission/reflection pair is not unitary within tolerance."""

    def __init__(self, condition: str, residual: float) -> None:
        super().__init__(condition, residual, "filter coefficients violate unitarity")
        self.residual = residual


class GridMismatchError(SpectralPovmError, ValueError):
    """Raised when two objects that must share a frequency grid do not."""

    def __init__(self, left: object, right: object) -> None:
        super().__init__(f"Frequency grids differ: {left!r} vs {right!r}")
        self.left = left
        self.right = right


class OutcomeUnreachableError(SpectralPovmError, RuntimeError):
    """Raised when a weight or probability is too small to normalise against."""

    def __init__(self, weight: float, what: str = "outcome") -> None:
        super().__init__(f"{what} unreachable: weight {weight:.3e} below floor")
        self.weight = weight


class IncompleteBasisError(SpectralPovmError, ValueError):
    """Raised when a mode basis does not cover every grid point."""

    def __init__(self, missing: int) -> None:
        super().__init__(f"Mode basis is incomplete: {missing} dimension(s) uncovered")
        self.missing = missing


class MemoryGuardError(SpectralPovmError, MemoryError):
    """Raised when a two-photon tabulation would exceed the grid-size guard."""

    def __init__(self, n_points: int, limit: int) -> None:
        super().__init__(f"Two-photon grid of {n_points} points exceeds the {limit}-point guard")
        self.n_points = n_points
        self.limit = limit


class ConfigError(SpectralPovmError, ValueError):
    """Raised for malformed scenario files or values that fail validation."""

    def __init__(self, message: str, section: Optional[str] = None, key: Optional[str] = None) -> None:
        location = section if key is None else f"{section}.{key}"
        super().__init__(f"[{location}] {message}" if location else message)
        self.section = section
        self.key = key


class ValidationFailure(SpectralPovmError, RuntimeError):
    """Raised when a numerical self-check exceeds its threshold."""

    def __init__(self, check: str, value: float, threshold: float) -> None:
        super().__init__(f"Check {check} failed: {value:.3e} > {threshold:.3e}")
        self.check = check
        self.value = value
        self.threshold = threshold


class PhysicsRegimeWarning(UserWarning):
    """Emitted when parameters leave the regime the model expressions assume."""


__all__ = [
    "ConfigError",
    "DomainError",
    "GridMismatchError",
    "IncompleteBasisError",
    "MemoryGuardError",
    "OutcomeUnreachableError",
    "PhysicsRegimeWarning",
    "SpectralPovmError",
    "UnitarityError",
    "ValidationFailure",
]
