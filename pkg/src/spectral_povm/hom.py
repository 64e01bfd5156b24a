"""Two-photon interference at a frequency filter used as a beam splitter.

One photon enters each input port (``phi1`` the transmitted side, ``phi2`` the reflected
side). Coincidences between the output ports vanish at ``w = w'`` exactly where
``|T|^2 = |R|^2 = 1/2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.optimize import bisect

from .cascade import TwoPhotonAmplitude
from .defaults import HOM_POINTS, HOM_SPAN, LOCUS_XTOL, TWO_PHOTON_GUARD
from .errors import DomainError, MemoryGuardError
from .filters import FilterSpec
from .spectral_core import FrequencyGrid, SpectralAmplitude, amplitude_at, make_grid, require_same_grid

logger = logging.getLogger(__name__)

_INPUT_NORM_TOL = 1e-10


@dataclass(frozen=True)
class HomOutput:
    """Output branches: both photons transmitted, both reflected, one in each port."""

    aa: TwoPhotonAmplitude
    bb: TwoPhotonAmplitude
    ab: TwoPhotonAmplitude

    def branch_probabilities(self) -> tuple[float, float, float]:
        return self.aa.norm_squared(), self.bb.norm_squared(), self.ab.norm_squared()


def hom_grid(omega0: float, gamma: float, n_points: int = HOM_POINTS, half_span: float = HOM_SPAN) -> FrequencyGrid:
    return make_grid(omega0 - half_span * gamma, omega0 + half_span * gamma, n_points)


def _check_inputs(phi1: SpectralAmplitude, phi2: SpectralAmplitude, spec: FilterSpec) -> None:
    require_same_grid(phi1.grid, phi2.grid)
    require_same_grid(phi1.grid, spec.grid)
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        norm2 = phi.norm_squared()
        if abs(norm2 - 1.0) > _INPUT_NORM_TOL:
            raise DomainError(name, norm2, "input photons must be normalised")


def _same_port(first: npt.NDArray[np.complex128], second: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    product = np.outer(first, second)
    return (product + product.T) / math.sqrt(2.0)


def _coincidence_amplitude(phi1: SpectralAmplitude, phi2: SpectralAmplitude, spec: FilterSpec) -> npt.NDArray[np.complex128]:
    transmitted = np.outer(phi1.values * spec.transmission, phi2.values * spec.transmission)
    reflected = np.outer(phi2.values * spec.reflection, phi1.values * spec.reflection)
    return transmitted + reflected


def hom_split(phi1: SpectralAmplitude, phi2: SpectralAmplitude, spec: FilterSpec) -> HomOutput:
    """Decompose the output of a product input into its three branches.

    Same-port branches are stored as symmetric amplitudes of two identical bosons; the
    coincidence branch keeps its (w in port a, w' in port b) ordering.
    """

    _check_inputs(phi1, phi2, spec)
    grid = phi1.grid
    aa = _same_port(phi1.values * spec.transmission, phi2.values * spec.reflection)
    bb = _same_port(phi1.values * spec.reflection, phi2.values * spec.transmission)
    ab = _coincidence_amplitude(phi1, phi2, spec)
    output = HomOutput(
        TwoPhotonAmplitude(grid, aa),
        TwoPhotonAmplitude(grid, bb),
        TwoPhotonAmplitude(grid, ab, symmetric=False),
    )
    logger.debug("hom_split: branch probabilities %s", output.branch_probabilities())
    return output


def destructive_residual(
    phi1: SpectralAmplitude,
    phi2: SpectralAmplitude,
    spec: FilterSpec,
    omega: float,
    omega_prime: float,
) -> float:
    """``|phi1(w)T(w)phi2(w')T(w') + phi1(w')R(w')phi2(w)R(w)|`` at any frequency pair."""

    require_same_grid(phi1.grid, phi2.grid)
    points = np.array([omega, omega_prime], dtype=np.float64)
    first, first_prime = amplitude_at(phi1, points)
    second, second_prime = amplitude_at(phi2, points)
    t, t_prime = spec.transmission_at(points)
    r, r_prime = spec.reflection_at(points)
    return float(abs(first * t * second_prime * t_prime + first_prime * r_prime * second * r))


def half_transmission_loci(spec: FilterSpec) -> list[float]:
    """Frequencies with ``|T|^2 = 1/2``, bracketed on the grid and bisected."""

    omega = spec.grid.omega
    excess = np.abs(spec.transmission) ** 2 - 0.5
    scale = spec.gamma if spec.gamma > 0 else spec.grid.spacing
    xtol = LOCUS_XTOL * scale

    def excess_at(point: float) -> float:
        return float(abs(complex(spec.transmission_at(point))) ** 2 - 0.5)

    loci: list[float] = []
    for i in range(omega.size):
        if excess[i] == 0.0:
            loci.append(float(omega[i]))
        elif i + 1 < omega.size and excess[i] * excess[i + 1] < 0.0:
            loci.append(float(bisect(excess_at, omega[i], omega[i + 1], xtol=xtol)))
    logger.debug("half_transmission_loci: %s", loci)
    return loci


def coincidence_map(phi1: SpectralAmplitude, phi2: SpectralAmplitude, spec: FilterSpec) -> npt.NDArray[np.float64]:
    """``|A(w, w')|^2`` of the coincidence branch over the grid square."""

    if phi1.grid.n_points > TWO_PHOTON_GUARD:
        raise MemoryGuardError(phi1.grid.n_points, TWO_PHOTON_GUARD)
    require_same_grid(phi1.grid, phi2.grid)
    require_same_grid(phi1.grid, spec.grid)
    return np.abs(_coincidence_amplitude(phi1, phi2, spec)) ** 2


__all__ = [
    "HomOutput",
    "coincidence_map",
    "destructive_residual",
    "half_transmission_loci",
    "hom_grid",
    "hom_split",
]
