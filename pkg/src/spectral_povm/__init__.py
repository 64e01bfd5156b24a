"""POVMs of frequency-filtered, time-resolved single-photon and photon-pair detection."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DomainError,
    GridMismatchError,
    IncompleteBasisError,
    MemoryGuardError,
    OutcomeUnreachableError,
    PhysicsRegimeWarning,
    SpectralPovmError,
    UnitarityError,
    ValidationFailure,
)
from .filters import FilterChain, FilterSpec, lorentzian_filter  # noqa: E402
from .spectral_core import FrequencyGrid, SpectralAmplitude, TimeWindow, make_grid  # noqa: E402

__all__ = [
    "ConfigError",
    "DomainError",
    "FilterChain",
    "FilterSpec",
    "FrequencyGrid",
    "GridMismatchError",
    "IncompleteBasisError",
    "MemoryGuardError",
    "OutcomeUnreachableError",
    "PhysicsRegimeWarning",
    "SpectralAmplitude",
    "SpectralPovmError",
    "TimeWindow",
    "UnitarityError",
    "ValidationFailure",
    "__version__",
    "lorentzian_filter",
    "make_grid",
]
