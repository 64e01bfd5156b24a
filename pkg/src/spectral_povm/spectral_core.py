"""Frequency grids, sampled amplitudes, discrete inner products and time transforms.

Every single-photon quantity in the package lives on a :class:`FrequencyGrid`: a
uniform grid of strictly positive angular frequencies carrying trapezoid quadrature
weights ``q_i``. Amplitudes are plain complex samples; the continuum ket ``|omega_i>``
corresponds to the grid indicator scaled by ``1/sqrt(q_i)`` so that the discrete
completeness relation ``sum_i q_i |omega_i><omega_i| = 1`` holds exactly. Operators are
therefore expressed in the orthonormal basis ``u_i = e_i / sqrt(q_i)`` wherever a dense
matrix is unavoidable (see :class:`DensityOperator`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt
from scipy.integrate import trapezoid

from .defaults import BLOCK_ENTRIES, NORMALIZE_TOL, WEIGHT_FLOOR, default_time_samples
from .errors import DomainError, GridMismatchError, OutcomeUnreachableError

logger = logging.getLogger(__name__)

ArrayLike = Union[Sequence[float], npt.NDArray[np.float64]]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform angular-frequency grid with trapezoid quadrature weights."""

    omega_min: float
    omega_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.omega_min > 0:
            raise DomainError("omega_min", self.omega_min, "frequencies must be positive")
        if not self.omega_max > self.omega_min:
            raise DomainError("omega_max", self.omega_max, "must exceed omega_min")
        if self.n_points < 2:
            raise DomainError("n_points", self.n_points, "a grid needs at least two points")

    @cached_property
    def omega(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    @cached_property
    def quad_weights(self) -> npt.NDArray[np.float64]:
        weights = np.full(self.n_points, self.spacing)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return weights

    @property
    def center(self) -> float:
        return 0.5 * (self.omega_min + self.omega_max)

    @property
    def span(self) -> float:
        return self.omega_max - self.omega_min


def make_grid(omega_min: float, omega_max: float, n_points: int) -> FrequencyGrid:
    """Build a uniform grid over ``[omega_min, omega_max]``."""

    return FrequencyGrid(float(omega_min), float(omega_max), int(n_points))


def grid_around(center: float, half_span: float, spacing: float) -> FrequencyGrid:
    """Return a grid centred on ``center`` whose spacing does not exceed ``spacing``."""

    n_points = int(math.ceil(2.0 * half_span / spacing)) + 1
    return make_grid(center - half_span, center + half_span, n_points)


def require_same_grid(left: FrequencyGrid, right: FrequencyGrid) -> None:
    if left != right:
        raise GridMismatchError(left, right)


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    """Complex amplitude ``phi(omega_i)`` sampled on a frequency grid."""

    grid: FrequencyGrid
    values: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n_points,):
            raise DomainError("values", values.shape, f"expected shape ({self.grid.n_points},)")
        object.__setattr__(self, "values", values)

    def norm_squared(self) -> float:
        return float(np.sum(self.grid.quad_weights * np.abs(self.values) ** 2))

    def normalize(self) -> "SpectralAmplitude":
        """Return a unit-norm copy; already-normalised amplitudes are returned as is."""

        norm2 = self.norm_squared()
        if norm2 < WEIGHT_FLOOR:
            raise OutcomeUnreachableError(norm2, "normalisation of a zero amplitude")
        if abs(norm2 - 1.0) <= NORMALIZE_TOL:
            return self
        return SpectralAmplitude(self.grid, self.values / math.sqrt(norm2))

    def scaled(self, factor: Union[complex, npt.NDArray[np.complex128]]) -> "SpectralAmplitude":
        return SpectralAmplitude(self.grid, self.values * factor)

    def as_orthonormal_vector(self) -> npt.NDArray[np.complex128]:
        """Coordinates in the orthonormal grid basis ``u_i``."""

        return np.sqrt(self.grid.quad_weights) * self.values


@dataclass(frozen=True, eq=False)
class TemporalAmplitude:
    """Complex amplitude sampled at strictly increasing instants."""

    times: npt.NDArray[np.float64]
    values: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.complex128)
        if times.ndim != 1 or values.shape != times.shape:
            raise DomainError("values", values.shape, "must match the time axis")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise DomainError("times", "non-increasing", "times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def intensity(self) -> npt.NDArray[np.float64]:
        return np.abs(self.values) ** 2

    def norm_squared(self) -> float:
        """Energy ``integral |values|^2 dt`` by the trapezoid rule."""

        if self.times.size < 2:
            raise DomainError("times", self.times.size, "energy needs at least two samples")
        return float(trapezoid(self.intensity(), self.times))


@dataclass(frozen=True)
class TimeWindow:
    """Detection interval ``[t0, t0 + dt]`` with efficiency ``eta``."""

    t0: float
    dt: float
    eta: float = 1.0
    n_time_samples: int = 1

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise DomainError("dt", self.dt, "window duration must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError("eta", self.eta, "efficiency must lie in [0, 1]")
        if self.n_time_samples < 1:
            raise DomainError("n_time_samples", self.n_time_samples, "at least one sample")

    @classmethod
    def with_default_sampling(
        cls, t0: float, dt: float, gamma: float, eta: float = 1.0
    ) -> "TimeWindow":
        return cls(t0, dt, eta, default_time_samples(gamma, dt))

    @property
    def midpoint(self) -> float:
        return self.t0 + 0.5 * self.dt


def time_samples(window: TimeWindow) -> npt.NDArray[np.float64]:
    """Midpoint-rule instants ``t0 + (j + 1/2) dt / n``."""

    step = window.dt / window.n_time_samples
    return window.t0 + (np.arange(window.n_time_samples) + 0.5) * step


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Single-photon density operator as a matrix in the orthonormal grid basis."""

    grid: FrequencyGrid
    matrix: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        n = self.grid.n_points
        if matrix.shape != (n, n):
            raise DomainError("matrix", matrix.shape, f"expected shape ({n}, {n})")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_amplitude(cls, amplitude: SpectralAmplitude) -> "DensityOperator":
        vector = amplitude.as_orthonormal_vector()
        return cls(amplitude.grid, np.outer(vector, vector.conj()))

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def purity(self) -> float:
        """``Tr(rho^2) / Tr(rho)^2``; equals ``Tr(rho^2)`` for unit-trace states."""

        trace = self.trace()
        if trace < WEIGHT_FLOOR:
            raise OutcomeUnreachableError(trace, "purity of a zero-trace operator")
        # Tr(rho^2) = sum |rho_jl|^2 for Hermitian rho.
        return float(np.sum(np.abs(self.matrix) ** 2)) / trace**2

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigenvalues(self) -> npt.NDArray[np.float64]:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))


def inner_product(f: SpectralAmplitude, g: SpectralAmplitude) -> complex:
    """Discrete ``<f|g> = sum_i q_i conj(f_i) g_i``."""

    require_same_grid(f.grid, g.grid)
    return complex(np.sum(f.grid.quad_weights * np.conj(f.values) * g.values))


def _fourier_rows(
    omega: npt.NDArray[np.float64],
    weighted: npt.NDArray[np.complex128],
    times: npt.NDArray[np.float64],
) -> npt.NDArray[np.complex128]:
    out = np.empty(times.size, dtype=np.complex128)
    block = max(1, BLOCK_ENTRIES // omega.size)
    for start in range(0, times.size, block):
        chunk = times[start : start + block]
        out[start : start + block] = np.exp(-1j * np.outer(chunk, omega)) @ weighted
    return out * _INV_SQRT_2PI


def to_time_domain(f: SpectralAmplitude, times: ArrayLike) -> TemporalAmplitude:
    """Direct-sum transform ``(1/sqrt(2 pi)) sum_i q_i f_i exp(-i omega_i t)``."""

    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    weighted = f.grid.quad_weights * f.values
    values = _fourier_rows(f.grid.omega, weighted, times)
    logger.debug("to_time_domain: %d frequencies x %d instants", f.grid.n_points, times.size)
    return TemporalAmplitude(times, values)


def time_lens(f: SpectralAmplitude, alpha: float, beta: float, times: ArrayLike) -> TemporalAmplitude:
    """Quadratic spectral phase, transform to time, then quadratic temporal phase.

    The spectral phase ``exp(-i alpha nu^2 / 2)`` uses ``nu`` measured from the grid
    midpoint, which removes the optical carrier from the chirp. For ``beta = 1 / alpha``
    and a strong chirp the output intensity maps ``|f(omega_c - t / alpha)|^2``.
    """

    if alpha == 0:
        raise DomainError("alpha", alpha, "the dispersive step needs a nonzero chirp")
    nu = f.grid.omega - f.grid.center
    chirped = f.scaled(np.exp(-0.5j * alpha * nu**2))
    transformed = to_time_domain(chirped, times)
    phase = np.exp(-0.5j * beta * transformed.times**2)
    return TemporalAmplitude(transformed.times, transformed.values * phase)


def amplitude_at(f: SpectralAmplitude, omegas: ArrayLike) -> npt.NDArray[np.complex128]:
    """Linearly interpolated amplitude at arbitrary frequencies (zero off the grid)."""

    omegas = np.asarray(omegas, dtype=np.float64)
    real = np.interp(omegas, f.grid.omega, f.values.real, left=0.0, right=0.0)
    imag = np.interp(omegas, f.grid.omega, f.values.imag, left=0.0, right=0.0)
    return real + 1j * imag


def gaussian_amplitude(grid: FrequencyGrid, center: float, width: float) -> SpectralAmplitude:
    """Normalised Gaussian amplitude; ``|phi|^2`` has standard deviation ``width``."""

    if not width > 0:
        raise DomainError("width", width, "must be positive")
    values = np.exp(-((grid.omega - center) ** 2) / (4.0 * width**2))
    return SpectralAmplitude(grid, values).normalize()


def exponential_pulse(grid: FrequencyGrid, center: float, decay: float) -> SpectralAmplitude:
    """Spectrum of a one-sided pulse ``exp(-decay t) theta(t)`` with carrier ``center``."""

    if not decay > 0:
        raise DomainError("decay", decay, "must be positive")
    values = 1.0 / (decay - 1j * (grid.omega - center))
    return SpectralAmplitude(grid, values).normalize()


def boxcar_amplitude(grid: FrequencyGrid, lo: float, hi: float) -> SpectralAmplitude:
    """Normalised indicator of the grid points inside ``[lo, hi]``."""

    inside = (grid.omega >= lo) & (grid.omega <= hi)
    if not inside.any():
        raise DomainError("boxcar", (lo, hi), "interval contains no grid point")
    return SpectralAmplitude(grid, inside.astype(np.complex128)).normalize()


def spectral_amplitude(grid: FrequencyGrid, values: ArrayLike, normalize: bool = True) -> SpectralAmplitude:
    amplitude = SpectralAmplitude(grid, np.asarray(values, dtype=np.complex128))
    return amplitude.normalize() if normalize else amplitude


def time_axis(t_min: float, t_max: float, n_times: int) -> npt.NDArray[np.float64]:
    if n_times < 1 or (n_times > 1 and not t_max > t_min):
        raise DomainError("times", (t_min, t_max, n_times), "invalid time axis")
    return np.linspace(t_min, t_max, n_times)


__all__ = [
    "DensityOperator",
    "FrequencyGrid",
    "SpectralAmplitude",
    "TemporalAmplitude",
    "TimeWindow",
    "amplitude_at",
    "boxcar_amplitude",
    "exponential_pulse",
    "gaussian_amplitude",
    "grid_around",
    "inner_product",
    "make_grid",
    "require_same_grid",
    "spectral_amplitude",
    "time_axis",
    "time_lens",
    "time_samples",
    "to_time_domain",
]
