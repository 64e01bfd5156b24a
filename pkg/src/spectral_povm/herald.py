"""Heralded single photons: conditioning a pair amplitude on a filtered detection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from .defaults import WEIGHT_FLOOR
from .errors import DomainError, OutcomeUnreachableError
from .filters import FilterSpec, read_numeric_table
from .povm_single import window_element
from .spectral_core import (
    DensityOperator,
    FrequencyGrid,
    SpectralAmplitude,
    TimeWindow,
    make_grid,
    require_same_grid,
)

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-10
Grids = Union[FrequencyGrid, tuple[FrequencyGrid, FrequencyGrid]]


@dataclass(frozen=True, eq=False)
class JointAmplitude:
    """Pair amplitude ``Phi(w, w')``: rows follow the herald grid, columns the signal grid."""

    herald_grid: FrequencyGrid
    signal_grid: FrequencyGrid
    values: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        shape = (self.herald_grid.n_points, self.signal_grid.n_points)
        if values.shape != shape:
            raise DomainError("values", values.shape, f"expected shape {shape}")
        object.__setattr__(self, "values", values)
        norm2 = self.norm_squared()
        if abs(norm2 - 1.0) > NORMALIZATION_TOL:
            raise DomainError("norm", norm2, "joint amplitude must be normalised")

    @classmethod
    def normalized(
        cls, herald_grid: FrequencyGrid, signal_grid: FrequencyGrid, values: npt.ArrayLike
    ) -> "JointAmplitude":
        values = np.asarray(values, dtype=np.complex128)
        norm2 = float(herald_grid.quad_weights @ (np.abs(values) ** 2) @ signal_grid.quad_weights)
        if norm2 < WEIGHT_FLOOR:
            raise OutcomeUnreachableError(norm2, "normalisation of a zero pair amplitude")
        return cls(herald_grid, signal_grid, values / math.sqrt(norm2))

    def norm_squared(self) -> float:
        return float(self.herald_grid.quad_weights @ (np.abs(self.values) ** 2) @ self.signal_grid.quad_weights)


@dataclass(frozen=True, eq=False)
class HeraldedState:
    """Normalised signal state together with the probability of the herald."""

    density: DensityOperator
    probability: float

    @property
    def purity(self) -> float:
        return self.density.purity()

    def validate(self, tolerance: float = 1e-10) -> None:
        """Check Hermiticity, unit trace and positivity."""

        hermitian = self.density.hermiticity_residual()
        if hermitian > 1e-12:
            raise DomainError("density", hermitian, "not Hermitian")
        trace = self.density.trace()
        if abs(trace - 1.0) > tolerance:
            raise DomainError("density", trace, "trace differs from 1")
        smallest = float(self.density.eigenvalues()[0])
        if smallest < -tolerance:
            raise DomainError("density", smallest, "negative eigenvalue")


@dataclass(frozen=True)
class HeraldOutcome:
    probability: float
    amplitude: SpectralAmplitude


@dataclass(frozen=True)
class TradeoffPoint:
    gamma: float
    dt: float
    purity: float
    efficiency: float


def _split_grids(grids: Grids) -> tuple[FrequencyGrid, FrequencyGrid]:
    if isinstance(grids, FrequencyGrid):
        return grids, grids
    herald_grid, signal_grid = grids
    return herald_grid, signal_grid


def correlated_gaussian_jsa(
    grids: Grids, pump_center: float, sigma_plus: float, sigma_minus: float
) -> JointAmplitude:
    """Downconversion toy model with sum and difference frequency widths.

    ``Phi ~ exp(-(w + w' - 2 wp)^2 / (4 s+^2)) exp(-(w - w')^2 / (4 s-^2))``.
    """

    for name, value in (("sigma_plus", sigma_plus), ("sigma_minus", sigma_minus)):
        if not value > 0:
            raise DomainError(name, value, "width must be positive")
    herald_grid, signal_grid = _split_grids(grids)
    w = herald_grid.omega[:, None]
    v = signal_grid.omega[None, :]
    exponent = (w + v - 2.0 * pump_center) ** 2 / (4.0 * sigma_plus**2) + (w - v) ** 2 / (4.0 * sigma_minus**2)
    return JointAmplitude.normalized(herald_grid, signal_grid, np.exp(-exponent))


def separable_gaussian_jsa(
    grids: Grids, center_herald: float, center_signal: float, width: float
) -> JointAmplitude:
    if not width > 0:
        raise DomainError("width", width, "width must be positive")
    herald_grid, signal_grid = _split_grids(grids)
    herald = np.exp(-((herald_grid.omega - center_herald) ** 2) / (4.0 * width**2))
    signal = np.exp(-((signal_grid.omega - center_signal) ** 2) / (4.0 * width**2))
    return JointAmplitude.normalized(herald_grid, signal_grid, np.outer(herald, signal))


def schmidt_purity(sigma_plus: float, sigma_minus: float) -> float:
    """Purity of either photon of the unfiltered Gaussian pair."""

    return 2.0 * sigma_plus * sigma_minus / (sigma_plus**2 + sigma_minus**2)


def load_jsa_table(path: Union[str, Path]) -> JointAmplitude:
    """Read ``w, w', Re Phi, Im Phi`` rows covering a full uniform tensor grid."""

    table = read_numeric_table(path, n_columns=4)
    herald_axis = np.unique(table[:, 0])
    signal_axis = np.unique(table[:, 1])
    grids = []
    for name, axis in (("herald", herald_axis), ("signal", signal_axis)):
        if axis.size < 2:
            raise DomainError(str(path), axis.size, f"{name} axis needs at least two frequencies")
        grid = make_grid(axis[0], axis[-1], axis.size)
        if not np.allclose(axis, grid.omega, rtol=0.0, atol=1e-6 * grid.spacing):
            raise DomainError(str(path), name, f"{name} frequencies are not uniformly spaced")
        grids.append(grid)
    if table.shape[0] != herald_axis.size * signal_axis.size:
        raise DomainError(str(path), table.shape[0], "rows do not cover the full tensor grid")
    rows = np.searchsorted(herald_axis, table[:, 0])
    cols = np.searchsorted(signal_axis, table[:, 1])
    values = np.zeros((herald_axis.size, signal_axis.size), dtype=np.complex128)
    values[rows, cols] = table[:, 2] + 1j * table[:, 3]
    return JointAmplitude.normalized(grids[0], grids[1], values)


def _conditioned(phi: JointAmplitude, rows: npt.NDArray[np.complex128], label: str) -> HeraldedState:
    """Signal state from herald projections ``rows`` (weighted, one outcome per row)."""

    projected = (rows @ phi.values) * np.sqrt(phi.signal_grid.quad_weights)[None, :]
    matrix = projected.T @ projected.conj()
    probability = float(np.real(np.trace(matrix)))
    if probability < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(probability, label)
    logger.debug("%s: %d outcome rows, probability %.6g", label, rows.shape[0], probability)
    return HeraldedState(DensityOperator(phi.signal_grid, matrix / probability), probability)


def herald_outcome(phi: JointAmplitude, spec: FilterSpec, phi_k: SpectralAmplitude) -> HeraldOutcome:
    """Click of the ideal mode ``phi_k`` behind the filter: probability and pure signal state."""

    require_same_grid(spec.grid, phi.herald_grid)
    require_same_grid(phi_k.grid, phi.herald_grid)
    row = phi.herald_grid.quad_weights * spec.transmission * np.conj(phi_k.values)
    conditional = row @ phi.values
    probability = float(np.sum(phi.signal_grid.quad_weights * np.abs(conditional) ** 2))
    if probability < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(probability, "heralding outcome")
    amplitude = SpectralAmplitude(phi.signal_grid, conditional / math.sqrt(probability))
    return HeraldOutcome(probability, amplitude)


def _mixed(phi: JointAmplitude, transmission: npt.NDArray[np.complex128], label: str) -> HeraldedState:
    rows = np.sqrt(phi.herald_grid.quad_weights)[:, None] * transmission[:, None] * phi.values
    projected = rows * np.sqrt(phi.signal_grid.quad_weights)[None, :]
    matrix = projected.T @ projected.conj()
    probability = float(np.real(np.trace(matrix)))
    if probability < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(probability, label)
    return HeraldedState(DensityOperator(phi.signal_grid, matrix / probability), probability)


def herald_mixed(phi: JointAmplitude, spec: FilterSpec) -> HeraldedState:
    """Outcome-ignorant herald: ``rho_c = (1/P) int dw |T(w)|^2 <w|Phi><Phi|w>``."""

    require_same_grid(spec.grid, phi.herald_grid)
    return _mixed(phi, spec.transmission, "frequency-unresolved herald")


def reduced_signal_state(phi: JointAmplitude) -> HeraldedState:
    """Signal photon with the herald traced out and no filter."""

    return _mixed(phi, np.ones(phi.herald_grid.n_points, dtype=np.complex128), "reduced state")


def herald_windowed(phi: JointAmplitude, spec: FilterSpec, window: TimeWindow) -> HeraldedState:
    """Herald clicks anywhere in the window, time of the click not recorded."""

    require_same_grid(spec.grid, phi.herald_grid)
    element = window_element(spec, 0, window)
    rows = np.sqrt(element.weights)[:, None] * np.conj(element.amplitudes) * phi.herald_grid.quad_weights[None, :]
    return _conditioned(phi, rows, "windowed herald")


def tradeoff_curve(
    phi: JointAmplitude,
    filter_family: Sequence[FilterSpec],
    windows: Sequence[Optional[TimeWindow]],
) -> list[TradeoffPoint]:
    """Purity and heralding efficiency for every filter/window pair.

    ``None`` in ``windows`` stands for an unbounded window (:func:`herald_mixed`).
    """

    if not filter_family or not windows:
        raise DomainError("sweep", (len(filter_family), len(windows)), "sweeps must be nonempty")
    points: list[TradeoffPoint] = []
    for spec in filter_family:
        for window in windows:
            if window is None:
                state = herald_mixed(phi, spec)
                dt = math.inf
            else:
                state = herald_windowed(phi, spec, window)
                dt = window.dt
            points.append(TradeoffPoint(spec.gamma, dt, state.purity, state.probability))
            logger.info("tradeoff: gamma=%g dt=%g purity=%.6g efficiency=%.6g", spec.gamma, dt, state.purity, state.probability)
    return points


__all__ = [
    "HeraldOutcome",
    "HeraldedState",
    "JointAmplitude",
    "TradeoffPoint",
    "correlated_gaussian_jsa",
    "herald_mixed",
    "herald_outcome",
    "herald_windowed",
    "load_jsa_table",
    "reduced_signal_state",
    "schmidt_purity",
    "separable_gaussian_jsa",
    "tradeoff_curve",
]
