"""Two-filter cascades: cross-port overlaps and the two-photon detection projector.

A two-photon state is written ``(1/sqrt 2) iint A(w, w') a+(w) a+(w') |vac>`` with a
symmetric ``A``; with that convention the Fock-space inner product is the plain grid
contraction ``sum_ij q_i q_j conj(A_ij) B_ij``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from .defaults import CASCADE_POINTS, CASCADE_SPAN, WEIGHT_FLOOR
from .errors import DomainError, OutcomeUnreachableError
from .filters import FilterChain, FilterSpec
from .povm_single import time_state
from .spectral_core import FrequencyGrid, SpectralAmplitude, inner_product, make_grid, require_same_grid

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TwoPhotonAmplitude:
    """Complex ``A(w_i, w'_j)`` on the square of one grid."""

    grid: FrequencyGrid
    values: npt.NDArray[np.complex128]
    symmetric: bool = True

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        n = self.grid.n_points
        if values.shape != (n, n):
            raise DomainError("values", values.shape, f"expected shape ({n}, {n})")
        if self.symmetric:
            scale = max(float(np.max(np.abs(values))), 1.0)
            asymmetry = float(np.max(np.abs(values - values.T)))
            if asymmetry > SYMMETRY_TOL * scale:
                raise DomainError("values", asymmetry, "amplitude flagged symmetric is not")
        object.__setattr__(self, "values", values)

    def norm_squared(self) -> float:
        q = self.grid.quad_weights
        return float(q @ (np.abs(self.values) ** 2) @ q)

    def normalize(self) -> "TwoPhotonAmplitude":
        norm2 = self.norm_squared()
        if norm2 < WEIGHT_FLOOR:
            raise OutcomeUnreachableError(norm2, "normalisation of a zero two-photon amplitude")
        return TwoPhotonAmplitude(self.grid, self.values / math.sqrt(norm2), self.symmetric)


@dataclass(frozen=True)
class TwoPhotonProjector:
    """``W |Psi_{t,t'}><Psi_{t,t'}|`` with the direct and exchange parts of ``W``."""

    weight: float
    amplitude: TwoPhotonAmplitude
    direct: float
    exchange: float


def two_photon_inner(first: TwoPhotonAmplitude, second: TwoPhotonAmplitude) -> complex:
    require_same_grid(first.grid, second.grid)
    q = first.grid.quad_weights
    return complex(q @ (np.conj(first.values) * second.values) @ q)


def symmetrized(phi_a: SpectralAmplitude, phi_b: SpectralAmplitude) -> TwoPhotonAmplitude:
    """Normalised ``phi_a (x) phi_b + phi_b (x) phi_a``: one photon in each mode."""

    require_same_grid(phi_a.grid, phi_b.grid)
    product = np.outer(phi_a.values, phi_b.values)
    return TwoPhotonAmplitude(phi_a.grid, product + product.T).normalize()


def cascade_grid(
    omega0: float,
    omega1: float,
    gamma: float,
    n_points: int = CASCADE_POINTS,
    half_span: float = CASCADE_SPAN,
) -> FrequencyGrid:
    """Grid covering ``+- half_span * gamma`` around both filter resonances."""

    lo = min(omega0, omega1) - half_span * gamma
    hi = max(omega0, omega1) + half_span * gamma
    return make_grid(lo, hi, n_points)


def _port_efficiencies(eta: float, eta1: Optional[float]) -> tuple[float, float]:
    eta1 = eta if eta1 is None else eta1
    for name, value in (("eta", eta), ("eta1", eta1)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(name, value, "efficiency must lie in [0, 1]")
    return eta, eta1


def cross_overlap(
    filter0: FilterSpec,
    filter1: FilterSpec,
    t: float,
    t_prime: float,
    eta: float = 1.0,
    eta1: Optional[float] = None,
) -> complex:
    """``<Psi'_{t'}|Psi_t>`` between a click behind ``filter0`` and one behind ``filter1``.

    ``filter1`` sits in the reflected port of ``filter0``. The efficiencies cancel in the
    normalised overlap but a dead detector has no states to compare.
    """

    eta, eta1 = _port_efficiencies(eta, eta1)
    if eta == 0.0 or eta1 == 0.0:
        raise OutcomeUnreachableError(0.0, "overlap with a zero-efficiency port")
    chain = FilterChain.of(filter0, filter1)
    first = time_state(chain, 0, t, eta)
    second = time_state(chain, 1, t_prime, eta1)
    return inner_product(second.amplitude, first.amplitude)


def two_photon_projector(
    filter0: FilterSpec,
    filter1: FilterSpec,
    t: float,
    t_prime: float,
    eta: float = 1.0,
    eta1: Optional[float] = None,
) -> TwoPhotonProjector:
    """One click at ``t`` behind ``filter0`` and one at ``t'`` behind ``filter1``.

    ``W = w w' (1 + |<Psi'_{t'}|Psi_t>|^2)``: a direct term plus an exchange term that
    matters only when both clicks are close in time and the filters overlap spectrally.
    """

    eta, eta1 = _port_efficiencies(eta, eta1)
    require_same_grid(filter0.grid, filter1.grid)
    grid = filter0.grid
    omega = grid.omega
    f = np.conj(filter0.transmission) * np.exp(1j * omega * t)
    g = np.conj(filter1.transmission * filter0.reflection) * np.exp(1j * omega * t_prime)
    scale = math.sqrt(eta * eta1) / (2.0 * math.pi)

    product = np.outer(f, g)
    values = (scale / math.sqrt(2.0)) * (product + product.T)
    unnormalised = TwoPhotonAmplitude(grid, values)
    weight = unnormalised.norm_squared()
    if weight < WEIGHT_FLOOR:
        raise OutcomeUnreachableError(weight, "two-photon detection")

    q = grid.quad_weights
    direct = scale**2 * float(np.sum(q * np.abs(f) ** 2)) * float(np.sum(q * np.abs(g) ** 2))
    exchange = scale**2 * abs(complex(np.sum(q * np.conj(f) * g))) ** 2
    logger.debug("two_photon_projector: t=%g t'=%g W=%.6g direct=%.6g exchange=%.6g", t, t_prime, weight, direct, exchange)
    amplitude = TwoPhotonAmplitude(grid, values / math.sqrt(weight))
    return TwoPhotonProjector(weight, amplitude, direct, exchange)


def joint_detection_probability(
    phi: TwoPhotonAmplitude,
    filter0: FilterSpec,
    filter1: FilterSpec,
    t: float,
    t_prime: float,
    eta: float = 1.0,
    eta1: Optional[float] = None,
) -> float:
    """Born rule ``W |<Psi_{t,t'}|Phi>|^2`` for a normalised symmetric pair amplitude."""

    require_same_grid(phi.grid, filter0.grid)
    projector = two_photon_projector(filter0, filter1, t, t_prime, eta, eta1)
    return projector.weight * abs(two_photon_inner(projector.amplitude, phi)) ** 2


__all__ = [
    "TwoPhotonAmplitude",
    "TwoPhotonProjector",
    "cascade_grid",
    "cross_overlap",
    "joint_detection_probability",
    "symmetrized",
    "two_photon_inner",
    "two_photon_projector",
]
