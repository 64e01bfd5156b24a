"""Frequency filters: unitary transmission/reflection pairs and filter cascades."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt
from scipy.interpolate import CubicSpline

from .defaults import NARROWBAND_RATIO, UNITARITY_TOL
from .errors import DomainError, GridMismatchError, PhysicsRegimeWarning, UnitarityError
from .spectral_core import FrequencyGrid, SpectralAmplitude, require_same_grid

logger = logging.getLogger(__name__)

Response = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.complex128]]
ReflectionConvention = Literal["lorentzian", "phase-locked"]


def unitarity_residuals(
    transmission: npt.NDArray[np.complex128], reflection: npt.NDArray[np.complex128]
) -> tuple[float, float]:
    """Max violations of ``|T|^2 + |R|^2 = 1`` and ``T R* + T* R = 0``."""

    power = np.abs(np.abs(transmission) ** 2 + np.abs(reflection) ** 2 - 1.0)
    cross = np.abs(transmission * np.conj(reflection) + np.conj(transmission) * reflection)
    return float(np.max(power)), float(np.max(cross))


def _phase_locked_reflection(transmission: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    magnitude2 = np.clip(np.abs(transmission) ** 2, 0.0, 1.0)
    return 1j * np.exp(1j * np.angle(transmission)) * np.sqrt(1.0 - magnitude2)


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """Transmission and reflection coefficients of one filter on a grid.

    ``response`` optionally evaluates ``T`` at arbitrary frequencies (model filters);
    tabulated filters are interpolated with a cubic spline instead.
    """

    grid: FrequencyGrid
    transmission: npt.NDArray[np.complex128]
    reflection: npt.NDArray[np.complex128]
    omega0: float
    gamma: float
    response: Optional[Response] = None
    convention: ReflectionConvention = "phase-locked"

    def __post_init__(self) -> None:
        transmission = np.asarray(self.transmission, dtype=np.complex128)
        reflection = np.asarray(self.reflection, dtype=np.complex128)
        shape = (self.grid.n_points,)
        if transmission.shape != shape or reflection.shape != shape:
            raise DomainError("transmission", transmission.shape, f"expected shape {shape}")
        power, cross = unitarity_residuals(transmission, reflection)
        if power > UNITARITY_TOL:
            raise UnitarityError("|T|^2+|R|^2-1", power)
        if cross > UNITARITY_TOL:
            raise UnitarityError("TR*+T*R", cross)
        object.__setattr__(self, "transmission", transmission)
        object.__setattr__(self, "reflection", reflection)

    def transmission_at(self, omegas: Union[float, npt.ArrayLike]) -> npt.NDArray[np.complex128]:
        omegas = np.asarray(omegas, dtype=np.float64)
        if self.response is not None:
            return np.asarray(self.response(omegas), dtype=np.complex128)
        return self._spline(omegas)

    def reflection_at(self, omegas: Union[float, npt.ArrayLike]) -> npt.NDArray[np.complex128]:
        transmission = self.transmission_at(omegas)
        if self.convention == "lorentzian":
            return 1.0 - transmission
        return _phase_locked_reflection(transmission)

    def _spline(self, omegas: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
        omega = self.grid.omega
        real = CubicSpline(omega, self.transmission.real)(omegas)
        imag = CubicSpline(omega, self.transmission.imag)(omegas)
        inside = (omegas >= omega[0]) & (omegas <= omega[-1])
        return np.where(inside, real + 1j * imag, 0.0)


@dataclass(frozen=True, eq=False)
class FilterChain:
    """Cascade where each filter receives the previous filter's reflected port."""

    filters: tuple[FilterSpec, ...]

    def __post_init__(self) -> None:
        filters = tuple(self.filters)
        if not filters:
            raise DomainError("filters", filters, "a chain needs at least one filter")
        for spec in filters[1:]:
            require_same_grid(filters[0].grid, spec.grid)
        object.__setattr__(self, "filters", filters)

    @classmethod
    def of(cls, *filters: FilterSpec) -> "FilterChain":
        return cls(tuple(filters))

    @property
    def grid(self) -> FrequencyGrid:
        return self.filters[0].grid

    def __len__(self) -> int:
        return len(self.filters)

    def port_coefficient(self, k: int) -> npt.NDArray[np.complex128]:
        if not 0 <= k < len(self.filters):
            raise IndexError(f"port {k} outside chain of {len(self.filters)} filter(s)")
        coefficient = self.filters[k].transmission.copy()
        for spec in self.filters[:k]:
            coefficient *= spec.reflection
        return coefficient

    def residual_coefficient(self) -> npt.NDArray[np.complex128]:
        """Coefficient of the port reflected by every filter of the chain."""

        coefficient = np.ones(self.grid.n_points, dtype=np.complex128)
        for spec in self.filters:
            coefficient = coefficient * spec.reflection
        return coefficient


def _lorentzian_transmission(omega0: float, gamma: float, omegas: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
    return gamma / (gamma - 1j * (np.asarray(omegas, dtype=np.float64) - omega0))


def lorentzian_filter(grid: FrequencyGrid, omega0: float, gamma: float) -> FilterSpec:
    """Model filter ``T = G / (G - i(w - w0))`` with ``R = 1 - T``."""

    if not gamma > 0:
        raise DomainError("gamma", gamma, "bandwidth must be positive")
    if omega0 / gamma < NARROWBAND_RATIO:
        message = f"omega0/gamma = {omega0 / gamma:.3g} is below {NARROWBAND_RATIO:g}; narrow-band model assumed"
        logger.warning(message)
        warnings.warn(message, PhysicsRegimeWarning, stacklevel=2)
    detuning = grid.omega - omega0
    denominator = gamma - 1j * detuning
    transmission = gamma / denominator
    reflection = -1j * detuning / denominator
    span = min(omega0 - grid.omega_min, grid.omega_max - omega0) / gamma
    logger.debug("lorentzian_filter: omega0=%g gamma=%g half-span=%.1f gamma", omega0, gamma, span)
    return FilterSpec(
        grid,
        transmission,
        reflection,
        float(omega0),
        float(gamma),
        response=partial(_lorentzian_transmission, float(omega0), float(gamma)),
        convention="lorentzian",
    )


def filter_from_transmission(
    grid: FrequencyGrid,
    t_samples: npt.ArrayLike,
    response: Optional[Response] = None,
) -> FilterSpec:
    """Complete tabulated transmission samples with ``R = i e^{i arg T} sqrt(1 - |T|^2)``."""

    transmission = np.asarray(t_samples, dtype=np.complex128)
    if transmission.shape != (grid.n_points,):
        raise DomainError("t_samples", transmission.shape, f"expected shape ({grid.n_points},)")
    magnitude = np.abs(transmission)
    worst = float(np.max(magnitude))
    if worst > 1.0 + UNITARITY_TOL:
        raise DomainError("|T|", worst, "transmission magnitude exceeds 1")
    transmission = np.where(magnitude > 1.0, transmission / np.maximum(magnitude, 1.0), transmission)
    reflection = _phase_locked_reflection(transmission)

    power = np.abs(transmission) ** 2
    omega0 = float(grid.omega[int(np.argmax(power))])
    gamma = float(np.sum(grid.quad_weights * power)) / math.pi
    return FilterSpec(grid, transmission, reflection, omega0, gamma, response=response)


def filter_from_table(
    grid: FrequencyGrid,
    omega: npt.ArrayLike,
    t_samples: npt.ArrayLike,
) -> FilterSpec:
    """Interpolate a transmission table onto ``grid``; ``T = 0`` outside the table."""

    omega = np.asarray(omega, dtype=np.float64)
    t_samples = np.asarray(t_samples, dtype=np.complex128)
    if omega.ndim != 1 or omega.size < 2 or omega.shape != t_samples.shape:
        raise DomainError("table", omega.shape, "needs matching omega and T columns")
    order = np.argsort(omega)
    omega, t_samples = omega[order], t_samples[order]
    if not np.all(np.diff(omega) > 0):
        raise DomainError("table", "duplicate frequencies", "omega column must be distinct")
    if omega.size == grid.n_points and np.allclose(omega, grid.omega, rtol=0.0, atol=1e-9 * grid.spacing):
        return filter_from_transmission(grid, t_samples)

    real = CubicSpline(omega, t_samples.real)
    imag = CubicSpline(omega, t_samples.imag)
    inside = (grid.omega >= omega[0]) & (grid.omega <= omega[-1])
    values = np.where(inside, real(grid.omega) + 1j * imag(grid.omega), 0.0)
    # Spline overshoot may push |T| marginally above 1.
    magnitude = np.abs(values)
    values = np.where(magnitude > 1.0, values / np.maximum(magnitude, 1.0), values)

    def response(points: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
        points = np.asarray(points, dtype=np.float64)
        inner = (points >= omega[0]) & (points <= omega[-1])
        return np.where(inner, real(points) + 1j * imag(points), 0.0)

    return filter_from_transmission(grid, values, response=response)


def load_transmission_table(path: Union[str, Path]) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.complex128]]:
    """Read ``omega, Re T, Im T`` columns separated by commas or whitespace."""

    columns = read_numeric_table(path, n_columns=3)
    return columns[:, 0], columns[:, 1] + 1j * columns[:, 2]


def read_numeric_table(path: Union[str, Path], n_columns: int) -> npt.NDArray[np.float64]:
    rows: list[list[float]] = []
    for line_number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        fields = stripped.replace(",", " ").split()
        try:
            row = [float(field) for field in fields]
        except ValueError as exc:
            raise DomainError(str(path), line_number, f"non-numeric entry in {line!r}") from exc
        if len(row) != n_columns:
            raise DomainError(str(path), line_number, f"expected {n_columns} columns, found {len(row)}")
        rows.append(row)
    if not rows:
        raise DomainError(str(path), 0, "table is empty")
    return np.asarray(rows, dtype=np.float64)


def effective_bandwidth(spec: FilterSpec) -> float:
    """``(1/pi) sum_i q_i |T_i|^2``; converges to Gamma for a wide Lorentzian grid."""

    return float(np.sum(spec.grid.quad_weights * np.abs(spec.transmission) ** 2)) / math.pi


def chain_port_coefficient(chain: FilterChain, k: int) -> npt.NDArray[np.complex128]:
    """``C_k = T_k prod_{j<k} R_j``: amplitude routed into the k-th transmitted port."""

    return chain.port_coefficient(k)


def apply_filter(f: SpectralAmplitude, spec: FilterSpec) -> tuple[SpectralAmplitude, SpectralAmplitude]:
    """Split ``f`` into unnormalised transmitted and reflected branches."""

    if f.grid != spec.grid:
        raise GridMismatchError(f.grid, spec.grid)
    return (
        SpectralAmplitude(f.grid, spec.transmission * f.values),
        SpectralAmplitude(f.grid, spec.reflection * f.values),
    )


def as_chain(filters: Union[FilterSpec, FilterChain, Sequence[FilterSpec]]) -> FilterChain:
    if isinstance(filters, FilterChain):
        return filters
    if isinstance(filters, FilterSpec):
        return FilterChain((filters,))
    return FilterChain(tuple(filters))


__all__ = [
    "FilterChain",
    "FilterSpec",
    "apply_filter",
    "as_chain",
    "chain_port_coefficient",
    "effective_bandwidth",
    "filter_from_table",
    "filter_from_transmission",
    "load_transmission_table",
    "lorentzian_filter",
    "read_numeric_table",
    "unitarity_residuals",
]
