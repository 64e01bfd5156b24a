"""POVM elements for frequency-resolved and time-resolved detection behind filters.

Elements come in three representations:

* :class:`PureElement` -- ``weight |psi><psi|`` with a normalised amplitude,
* :class:`DiagonalElement` -- ``sum_i d_i |u_i><u_i|``, diagonal in the orthonormal
  grid basis (the discretised ``integral dw d(w) |w><w|``),
* :class:`EnsembleElement` -- ``sum_j lambda_j |psi_j><psi_j|``; used for time windows,
  where the members are the time-sampled states ``|Psi_t>``.

Traces, Hilbert-Schmidt products and spectra of rank-one sums go through Gram matrices
of the members, so dense grid-by-grid operators are never formed for window elements.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
import numpy.typing as npt
from scipy.special import eval_hermite

from .defaults import OPERATOR_BOUND_TOL, WEIGHT_FLOOR
from .errors import DomainError, IncompleteBasisError, OutcomeUnreachableError
from .filters import FilterChain, FilterSpec, as_chain
from .spectral_core import (
    DensityOperator,
    FrequencyGrid,
    SpectralAmplitude,
    TimeWindow,
    require_same_grid,
    time_samples,
)

logger = logging.getLogger(__name__)

Representation = Literal["pure", "diagonal", "ensemble"]
BasisKind = Literal["boxcar-bins", "hermite-gauss"]
Chainable = Union[FilterSpec, FilterChain]


@dataclass(frozen=True, eq=False)
class PureElement:
    """``weight |amplitude><amplitude|``."""

    weight: float
    amplitude: SpectralAmplitude

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise DomainError("weight", self.weight, "POVM weights are nonnegative")

    @property
    def grid(self) -> FrequencyGrid:
        return self.amplitude.grid

    @property
    def representation(self) -> Representation:
        return "pure"


@dataclass(frozen=True, eq=False)
class DiagonalElement:
    """Element diagonal in frequency, with nonnegative density samples."""

    grid: FrequencyGrid
    density: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        density = np.asarray(self.density, dtype=np.float64)
        if density.shape != (self.grid.n_points,):
            raise DomainError("density", density.shape, f"expected shape ({self.grid.n_points},)")
        if np.any(density < 0):
            raise DomainError("density", float(density.min()), "density must be nonnegative")
        object.__setattr__(self, "density", density)

    @property
    def representation(self) -> Representation:
        return "diagonal"

    def integrated_density(self) -> float:
        """``integral dw d(w)`` by quadrature."""

        return float(np.sum(self.grid.quad_weights * self.density))


@dataclass(frozen=True, eq=False)
class EnsembleElement:
    """Weighted sum of rank-one projectors; ``amplitudes`` holds one member per row."""

    grid: FrequencyGrid
    weights: npt.NDArray[np.float64]
    amplitudes: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        weights = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        amplitudes = np.atleast_2d(np.asarray(self.amplitudes, dtype=np.complex128))
        if amplitudes.shape != (weights.size, self.grid.n_points):
            raise DomainError("amplitudes", amplitudes.shape, "one grid-sized row per weight")
        if np.any(weights < 0):
            raise DomainError("weights", float(weights.min()), "POVM weights are nonnegative")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def representation(self) -> Representation:
        return "ensemble"

    def member(self, j: int) -> SpectralAmplitude:
        return SpectralAmplitude(self.grid, self.amplitudes[j])


PovmElement = Union[PureElement, DiagonalElement, EnsembleElement]


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """Orthonormal mode functions on a grid, one per row of ``modes``."""

    grid: FrequencyGrid
    modes: npt.NDArray[np.complex128]
    kind: BasisKind
    bins: tuple[npt.NDArray[np.int64], ...] = ()

    def __post_init__(self) -> None:
        modes = np.atleast_2d(np.asarray(self.modes, dtype=np.complex128))
        if modes.shape[1] != self.grid.n_points:
            raise DomainError("modes", modes.shape, "rows must be sampled on the grid")
        object.__setattr__(self, "modes", modes)

    def __len__(self) -> int:
        return self.modes.shape[0]

    def mode(self, k: int) -> SpectralAmplitude:
        return SpectralAmplitude(self.grid, self.modes[k])

    def orthonormality_residual(self) -> float:
        vectors = self.modes * np.sqrt(self.grid.quad_weights)
        gram = vectors.conj() @ vectors.T
        return float(np.max(np.abs(gram - np.eye(len(self)))))

    def without_bin(self, index: int) -> "ModeBasis":
        """Drop every mode supported on bin ``index``."""

        drop = set(self.bins[index].tolist())
        keep = [k for k in range(len(self)) if not drop.intersection(np.flatnonzero(self.modes[k]).tolist())]
        bins = tuple(b for i, b in enumerate(self.bins) if i != index)
        return ModeBasis(self.grid, self.modes[keep], self.kind, bins)


@dataclass(frozen=True)
class TimeState:
    """Weight density ``w`` and normalised state ``|Psi_t>`` for detection at time ``t``."""

    weight: float
    amplitude: SpectralAmplitude
    t: float


@dataclass(frozen=True)
class CompletenessResidual:
    diagonal: float
    off_diagonal: float


def _rank_one_factors(element: PovmElement) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.complex128]]:
    """Weights and members in orthonormal grid coordinates, one row per member."""

    if isinstance(element, PureElement):
        return np.array([element.weight]), element.amplitude.as_orthonormal_vector()[None, :]
    if isinstance(element, EnsembleElement):
        return element.weights, element.amplitudes * np.sqrt(element.grid.quad_weights)
    raise TypeError(f"{type(element).__name__} is not a rank-one sum")


def gram_matrix(element: Union[PureElement, EnsembleElement]) -> npt.NDArray[np.complex128]:
    """``G_jl = <psi_j|psi_l>`` for the members of ``element``."""

    _, vectors = _rank_one_factors(element)
    return vectors.conj() @ vectors.T


def trace(element: PovmElement) -> float:
    """Trace in the orthonormal grid basis.

    A diagonal element contributes ``sum_i d_i``, not the quadrature integral; use
    ``DiagonalElement.integrated_density`` for ``integral dw d(w)``.
    """

    if isinstance(element, DiagonalElement):
        return float(np.sum(element.density))
    weights, vectors = _rank_one_factors(element)
    norms = np.sum(np.abs(vectors) ** 2, axis=1)
    return float(np.sum(weights * norms))


def hs_product(first: PovmElement, second: PovmElement) -> float:
    """Hilbert-Schmidt product ``Tr(first @ second)``."""

    require_same_grid(first.grid, second.grid)
    if isinstance(first, DiagonalElement) and isinstance(second, DiagonalElement):
        return float(np.sum(first.density * second.density))
    if isinstance(first, DiagonalElement):
        first, second = second, first
    weights, vectors = _rank_one_factors(first)
    if isinstance(second, DiagonalElement):
        return float(np.sum(weights * (np.abs(vectors) ** 2 @ second.density)))
    other_weights, other_vectors = _rank_one_factors(second)
    overlaps = vectors.conj() @ other_vectors.T
    return float(weights @ (np.abs(overlaps) ** 2) @ other_weights)


def purity(element: PovmElement) -> float:
    """``Tr(P^2) / Tr(P)^2``; one exactly for weight-times-projector elements."""

    total = trace(element)
    if total < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(total, "purity of a zero-trace element")
    if isinstance(element, PureElement):
        return 1.0
    return hs_product(element, element) / total**2


def d_eff(element: PovmElement) -> float:
    """Effective number of orthogonal inputs compatible with the outcome."""

    return 1.0 / purity(element)


def diagonal(element: PovmElement) -> npt.NDArray[np.float64]:
    """Diagonal of the element in the orthonormal grid basis."""

    if isinstance(element, DiagonalElement):
        return element.density.copy()
    weights, vectors = _rank_one_factors(element)
    return weights @ (np.abs(vectors) ** 2)


def off_diagonal_norm(element: PovmElement) -> float:
    """Frobenius norm of the element with its diagonal removed."""

    if isinstance(element, DiagonalElement):
        return 0.0
    remainder = hs_product(element, element) - float(np.sum(diagonal(element) ** 2))
    return math.sqrt(max(remainder, 0.0))


def max_eigenvalue(element: PovmElement) -> float:
    if isinstance(element, DiagonalElement):
        return float(np.max(element.density))
    weights, _ = _rank_one_factors(element)
    root = np.sqrt(weights)
    kernel = root[:, None] * gram_matrix(element) * root[None, :]
    return float(np.linalg.eigvalsh(kernel)[-1])


def operator_bound(element: PovmElement, tolerance: float = OPERATOR_BOUND_TOL) -> float:
    """Largest eigenvalue of ``element``, warning when it exceeds the identity.

    Midpoint sampling of long windows can push a window element slightly above 1;
    raising ``n_time_samples`` removes the excess.
    """

    value = max_eigenvalue(element)
    if value > 1.0 + tolerance:
        logger.warning("POVM element exceeds the identity: largest eigenvalue %.12g", value)
    return value


def _filtered_element(coefficient: npt.NDArray[np.complex128], phi_k: SpectralAmplitude, label: str) -> PureElement:
    weight = float(np.sum(phi_k.grid.quad_weights * np.abs(coefficient) ** 2 * np.abs(phi_k.values) ** 2))
    if weight < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(weight, label)
    amplitude = SpectralAmplitude(phi_k.grid, np.conj(coefficient) * phi_k.values).normalize()
    return PureElement(weight, amplitude)


def ideal_element(spec: FilterSpec, phi_k: SpectralAmplitude) -> PureElement:
    """``w_k |T phi_k><T phi_k|``; the state carries ``conj(T)``, the weight ``|T|^2``."""

    require_same_grid(spec.grid, phi_k.grid)
    return _filtered_element(spec.transmission, phi_k, "transmitted outcome")


def reflected_element(spec: FilterSpec, phi_k: SpectralAmplitude) -> PureElement:
    """``u_k |R phi_k><R phi_k|`` for detection in the reflected port."""

    require_same_grid(spec.grid, phi_k.grid)
    return _filtered_element(spec.reflection, phi_k, "reflected outcome")


def null_element(spec: FilterSpec) -> DiagonalElement:
    """No click behind the filter: density ``|R(w)|^2``."""

    return DiagonalElement(spec.grid, np.abs(spec.reflection) ** 2)


def ideal_overlap(spec: FilterSpec, phi_k: SpectralAmplitude, phi_l: SpectralAmplitude) -> complex:
    """``<T phi_k|T phi_l>`` between normalised filtered modes."""

    first = ideal_element(spec, phi_k).amplitude
    second = ideal_element(spec, phi_l).amplitude
    return complex(np.sum(spec.grid.quad_weights * np.conj(first.values) * second.values))


def _bin_indices(grid: FrequencyGrid, bin_width: float) -> tuple[npt.NDArray[np.int64], ...]:
    n_bins = max(1, int(math.floor(grid.span / bin_width + 1e-9)))
    labels = np.minimum(((grid.omega - grid.omega_min) / bin_width).astype(np.int64), n_bins - 1)
    return tuple(np.flatnonzero(labels == b) for b in range(n_bins))


def boxcar_basis(grid: FrequencyGrid, bin_width: float, complete: bool = True) -> ModeBasis:
    """Frequency bins of width ``bin_width`` tiling the grid.

    With ``complete`` each bin of ``m`` points carries ``m`` orthonormal harmonics
    ``exp(2 pi i p n / m) / sqrt(m q_n)``, so the modes span the whole discretised
    space; otherwise each bin contributes only its flat indicator.
    """

    if not bin_width > 0:
        raise DomainError("bin_width", bin_width, "must be positive")
    bins = _bin_indices(grid, bin_width)
    weights = grid.quad_weights
    rows: list[npt.NDArray[np.complex128]] = []
    for indices in bins:
        m = indices.size
        if complete:
            local = np.arange(m)
            harmonics = np.exp(2j * np.pi * np.outer(np.arange(m), local) / m) / np.sqrt(m * weights[indices])
            block = np.zeros((m, grid.n_points), dtype=np.complex128)
            block[:, indices] = harmonics
            rows.extend(block)
        else:
            row = np.zeros(grid.n_points, dtype=np.complex128)
            row[indices] = 1.0 / math.sqrt(float(np.sum(weights[indices])))
            rows.append(row)
    logger.debug("boxcar_basis: %d bins, %d modes", len(bins), len(rows))
    return ModeBasis(grid, np.asarray(rows), "boxcar-bins", bins)


def hermite_gauss_basis(grid: FrequencyGrid, center: float, width: float, n_modes: int) -> ModeBasis:
    """First ``n_modes`` Hermite-Gauss modes, re-orthonormalised on the grid."""

    if not width > 0 or n_modes < 1:
        raise DomainError("hermite_gauss", (width, n_modes), "need positive width and n_modes >= 1")
    x = (grid.omega - center) / (math.sqrt(2.0) * width)
    envelope = np.exp(-0.5 * x**2)
    raw = np.array([eval_hermite(n, x) * envelope for n in range(n_modes)], dtype=np.complex128)
    vectors = raw * np.sqrt(grid.quad_weights)
    cholesky = np.linalg.cholesky(vectors.conj() @ vectors.T)
    modes = np.linalg.solve(cholesky, raw)
    return ModeBasis(grid, modes, "hermite-gauss")


def completeness_residual(basis: ModeBasis, spec: FilterSpec, strict: bool = True) -> CompletenessResidual:
    """Residual of ``P_null + sum_k P_k`` against the identity.

    ``diagonal`` is ``max |d_sum + |R|^2 - 1|`` and ``off_diagonal`` the Frobenius norm of
    the off-diagonal part of ``sum_k P_k``. With ``strict`` an undersized basis raises.
    """

    require_same_grid(basis.grid, spec.grid)
    missing = spec.grid.n_points - len(basis)
    if strict and missing > 0:
        raise IncompleteBasisError(missing)
    vectors = basis.modes * np.conj(spec.transmission) * np.sqrt(spec.grid.quad_weights)
    summed = vectors.T @ vectors.conj()
    d_sum = np.real(np.diag(summed))
    diagonal_residual = float(np.max(np.abs(d_sum + np.abs(spec.reflection) ** 2 - 1.0)))
    off = summed - np.diag(np.diag(summed))
    return CompletenessResidual(diagonal_residual, float(np.linalg.norm(off)))


def _port_coefficient(chain: Chainable, port: int) -> tuple[FilterChain, npt.NDArray[np.complex128], float]:
    chain = as_chain(chain)
    coefficient = chain.port_coefficient(port)
    norm2 = float(np.sum(chain.grid.quad_weights * np.abs(coefficient) ** 2))
    if norm2 < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(norm2, f"detection in port {port}")
    return chain, coefficient, norm2


def time_state(chain: Chainable, port: int, t: float, eta: float = 1.0) -> TimeState:
    """``|Psi_t>`` proportional to ``conj(C_k) e^{i w t}`` and weight ``(eta / 2pi) int |C_k|^2``."""

    if not 0.0 <= eta <= 1.0:
        raise DomainError("eta", eta, "efficiency must lie in [0, 1]")
    chain, coefficient, norm2 = _port_coefficient(chain, port)
    values = np.conj(coefficient) * np.exp(1j * chain.grid.omega * t) / math.sqrt(norm2)
    return TimeState(eta * norm2 / (2.0 * math.pi), SpectralAmplitude(chain.grid, values), float(t))


def overlap_time(chain: Chainable, port: int, t: float, t_prime: float) -> complex:
    """``<Psi_t|Psi_t'>`` by quadrature."""

    chain, coefficient, norm2 = _port_coefficient(chain, port)
    kernel = chain.grid.quad_weights * np.abs(coefficient) ** 2
    return complex(np.sum(kernel * np.exp(1j * chain.grid.omega * (t_prime - t))) / norm2)


def closed_form_overlap(gamma: float, omega0: float, dt: float) -> complex:
    """Lorentzian limit ``exp(-G |dt|) exp(i w0 dt)`` of :func:`overlap_time`."""

    return complex(math.exp(-gamma * abs(dt)) * np.exp(1j * omega0 * dt))


def window_element(chain: Chainable, port: int, window: TimeWindow) -> EnsembleElement:
    """Detection anywhere in ``[t0, t0 + dt]``: midpoint samples of ``w |Psi_t><Psi_t|``."""

    chain, coefficient, norm2 = _port_coefficient(chain, port)
    weight = window.eta * norm2 / (2.0 * math.pi)
    times = time_samples(window)
    amplitudes = np.conj(coefficient)[None, :] * np.exp(1j * np.outer(times, chain.grid.omega)) / math.sqrt(norm2)
    weights = np.full(times.size, weight * window.dt / times.size)
    logger.debug(
        "window_element: port=%d samples=%d grid=%d trace=%.6g",
        port,
        times.size,
        chain.grid.n_points,
        weight * window.dt,
    )
    return EnsembleElement(chain.grid, weights, amplitudes)


def pure_limit_element(chain: Chainable, port: int, window: TimeWindow) -> PureElement:
    """Short-window approximation ``w dt |Psi_mid><Psi_mid|``."""

    state = time_state(chain, port, window.midpoint, window.eta)
    return PureElement(state.weight * window.dt, state.amplitude)


def closed_form_purity(x: float) -> float:
    """``(e^{-2x} + 2x - 1) / (2 x^2)`` for ``x = G dt``, with its limit 1 at ``x = 0``."""

    if x < 0:
        raise DomainError("gamma_dt", x, "must be nonnegative")
    if x < 1e-4:
        return 1.0 - 2.0 * x / 3.0 + x * x / 3.0
    return (math.expm1(-2.0 * x) + 2.0 * x) / (2.0 * x * x)


def detection_probability(state: Union[SpectralAmplitude, DensityOperator], element: PovmElement) -> float:
    """Born rule ``Tr(rho P)`` for an amplitude or a density operator."""

    require_same_grid(state.grid, element.grid)
    if isinstance(state, SpectralAmplitude):
        vector = state.as_orthonormal_vector()
        if isinstance(element, DiagonalElement):
            return float(np.sum(element.density * np.abs(vector) ** 2))
        weights, members = _rank_one_factors(element)
        return float(np.sum(weights * np.abs(members.conj() @ vector) ** 2))
    matrix = state.matrix
    if isinstance(element, DiagonalElement):
        return float(np.sum(element.density * np.real(np.diag(matrix))))
    weights, members = _rank_one_factors(element)
    expectations = np.real(np.einsum("ji,ik,jk->j", members.conj(), matrix, members))
    return float(np.sum(weights * expectations))


__all__ = [
    "CompletenessResidual",
    "DiagonalElement",
    "EnsembleElement",
    "ModeBasis",
    "PovmElement",
    "PureElement",
    "TimeState",
    "boxcar_basis",
    "closed_form_overlap",
    "closed_form_purity",
    "completeness_residual",
    "d_eff",
    "detection_probability",
    "diagonal",
    "gram_matrix",
    "hermite_gauss_basis",
    "hs_product",
    "ideal_element",
    "ideal_overlap",
    "max_eigenvalue",
    "null_element",
    "off_diagonal_norm",
    "operator_bound",
    "overlap_time",
    "pure_limit_element",
    "purity",
    "reflected_element",
    "time_state",
    "trace",
]
