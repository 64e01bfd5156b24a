import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from spectral_povm.errors import DomainError, MemoryGuardError
from spectral_povm.filters import filter_from_transmission, lorentzian_filter
from spectral_povm.hom import (
    coincidence_map,
    destructive_residual,
    half_transmission_loci,
    hom_grid,
    hom_split,
)
from spectral_povm.spectral_core import SpectralAmplitude, gaussian_amplitude, make_grid


@pytest.fixture(scope="module")
def setup():
    grid = hom_grid(2000.0, 1.0, n_points=401)
    spec = lorentzian_filter(grid, 2000.0, 1.0)
    return grid, spec


def test_branches_conserve_probability(setup):
    grid, spec = setup
    phi1 = gaussian_amplitude(grid, 2000.0, 1.0)
    phi2 = gaussian_amplitude(grid, 2000.5, 1.5)
    aa, bb, ab = hom_split(phi1, phi2, spec).branch_probabilities()
    assert aa + bb + ab == pytest.approx(1.0, abs=1e-10)
    assert min(aa, bb, ab) >= 0.0


def test_loci_sit_one_linewidth_from_resonance(setup):
    _, spec = setup
    loci = half_transmission_loci(spec)
    assert len(loci) == 2
    np.testing.assert_allclose(loci, [1999.0, 2001.0], atol=1e-8)


def test_coincidences_vanish_on_the_loci_for_identical_photons(setup):
    grid, spec = setup
    phi = gaussian_amplitude(grid, 2000.0, 1.0)
    for omega in half_transmission_loci(spec):
        assert destructive_residual(phi, phi, spec, omega, omega) < 1e-8
    on_resonance = destructive_residual(phi, phi, spec, 2000.0, 2000.0)
    assert on_resonance > 0.1


def test_coincidence_map_diagonal_dips_at_loci(setup):
    grid, spec = setup
    phi = gaussian_amplitude(grid, 2000.0, 1.0)
    coincidences = coincidence_map(phi, phi, spec)
    assert coincidences.shape == (grid.n_points, grid.n_points)
    i = int(np.argmin(np.abs(grid.omega - 2001.0)))
    assert coincidences[i, i] < 1e-8 * coincidences.max()


def test_unnormalised_inputs_rejected(setup):
    grid, spec = setup
    phi = gaussian_amplitude(grid, 2000.0, 1.0)
    with pytest.raises(DomainError):
        hom_split(phi, SpectralAmplitude(grid, 2.0 * phi.values), spec)


def test_memory_guard_on_oversized_grids():
    grid = make_grid(1900.0, 2100.0, 4097)
    spec = lorentzian_filter(grid, 2000.0, 1.0)
    phi = gaussian_amplitude(grid, 2000.0, 1.0)
    with pytest.raises(MemoryGuardError):
        coincidence_map(phi, phi, spec)


def test_coincidences_ignore_global_phases(setup):
    grid, spec = setup
    phi1 = gaussian_amplitude(grid, 2000.0, 1.0)
    phi2 = gaussian_amplitude(grid, 2000.8, 1.2)
    rotated = SpectralAmplitude(grid, np.exp(0.7j) * phi1.values)
    np.testing.assert_allclose(coincidence_map(rotated, phi2, spec), coincidence_map(phi1, phi2, spec), atol=1e-12)


def _either_of_two_cavities(grid, first, second, gamma=1.0):
    def response(points):
        points = np.asarray(points, dtype=np.float64)
        blocked = 1.0
        for center in (first, second):
            blocked = blocked * (points - center) ** 2 / (gamma**2 + (points - center) ** 2)
        return np.sqrt(1.0 - blocked).astype(np.complex128)

    return filter_from_transmission(grid, response(grid.omega), response=response)


def test_identical_photons_bunch_symmetrically(setup):
    grid, spec = setup
    phi = gaussian_amplitude(grid, 2000.4, 1.2)
    aa, bb, _ = hom_split(phi, phi, spec).branch_probabilities()
    assert aa == pytest.approx(bb, rel=1e-12)


def test_fully_transmitting_filter_never_bunches():
    grid = hom_grid(2000.0, 1.0, n_points=201)
    spec = filter_from_transmission(grid, np.ones(grid.n_points))
    phi1 = gaussian_amplitude(grid, 2000.0, 1.0)
    phi2 = gaussian_amplitude(grid, 2001.0, 1.0)
    aa, bb, ab = hom_split(phi1, phi2, spec).branch_probabilities()
    assert aa == 0.0
    assert bb == 0.0
    assert ab == pytest.approx(1.0, abs=1e-10)
    assert half_transmission_loci(spec) == []


def test_two_cavity_filter_has_four_half_transmission_points():
    grid = make_grid(1980.0, 2040.0, 1201)
    spec = _either_of_two_cavities(grid, 2000.0, 2020.0)
    loci = half_transmission_loci(spec)
    assert len(loci) == 4
    np.testing.assert_allclose(np.abs(spec.transmission_at(loci)) ** 2, 0.5, atol=1e-8)
    assert loci[0] < 2000.0 < loci[1] < loci[2] < 2020.0 < loci[3]


def test_differently_coloured_photons_still_dip_on_the_loci(setup):
    grid, spec = setup
    phi1 = gaussian_amplitude(grid, 1999.0, 1.0)
    phi2 = gaussian_amplitude(grid, 2001.0, 1.0)
    for omega in half_transmission_loci(spec):
        assert destructive_residual(phi1, phi2, spec, omega, omega) < 1e-8
    assert destructive_residual(phi1, phi2, spec, 1999.0, 2001.0) > 1e-3
    coincidences = coincidence_map(phi1, phi2, spec)
    i = int(np.argmin(np.abs(grid.omega - 2001.0)))
    assert coincidences[i, i] < 1e-8 * coincidences.max()
