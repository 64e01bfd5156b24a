import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from spectral_povm.errors import DomainError, GridMismatchError, OutcomeUnreachableError
from spectral_povm.spectral_core import (
    DensityOperator,
    SpectralAmplitude,
    TemporalAmplitude,
    TimeWindow,
    amplitude_at,
    boxcar_amplitude,
    exponential_pulse,
    gaussian_amplitude,
    grid_around,
    inner_product,
    make_grid,
    require_same_grid,
    time_axis,
    time_lens,
    time_samples,
    to_time_domain,
)


def test_grid_rejects_nonpositive_frequencies_and_short_grids():
    with pytest.raises(DomainError):
        make_grid(0.0, 10.0, 11)
    with pytest.raises(DomainError):
        make_grid(5.0, 5.0, 11)
    with pytest.raises(DomainError):
        make_grid(1.0, 2.0, 1)


def test_quadrature_weights_integrate_constants_exactly():
    grid = make_grid(100.0, 140.0, 401)
    assert grid.spacing == pytest.approx(0.1)
    assert float(np.sum(grid.quad_weights)) == pytest.approx(grid.span, rel=1e-14)
    assert grid.quad_weights[0] == pytest.approx(0.5 * grid.spacing)


def test_grid_around_never_exceeds_requested_spacing():
    grid = grid_around(2000.0, 40.0, 0.3)
    assert grid.spacing <= 0.3
    assert grid.center == pytest.approx(2000.0)


def test_mismatched_grids_raise():
    with pytest.raises(GridMismatchError):
        require_same_grid(make_grid(1.0, 2.0, 11), make_grid(1.0, 2.0, 12))


def test_presets_are_normalised():
    grid = make_grid(80.0, 120.0, 801)
    for amplitude in (
        gaussian_amplitude(grid, 100.0, 1.0),
        exponential_pulse(grid, 100.0, 0.5),
        boxcar_amplitude(grid, 99.0, 101.0),
    ):
        assert amplitude.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_normalize_returns_same_object_when_already_normalised():
    grid = make_grid(80.0, 120.0, 401)
    phi = gaussian_amplitude(grid, 100.0, 1.0)
    assert phi.normalize() is phi


def test_zero_amplitude_cannot_be_normalised():
    grid = make_grid(80.0, 120.0, 41)
    with pytest.raises(OutcomeUnreachableError):
        SpectralAmplitude(grid, np.zeros(41)).normalize()


def test_inner_product_matches_orthonormal_coordinates():
    grid = make_grid(80.0, 120.0, 401)
    f = gaussian_amplitude(grid, 99.0, 1.0)
    g = exponential_pulse(grid, 101.0, 1.0)
    direct = inner_product(f, g)
    via_vectors = complex(np.vdot(f.as_orthonormal_vector(), g.as_orthonormal_vector()))
    assert direct == pytest.approx(via_vectors, abs=1e-14)
    assert abs(direct) <= 1.0


def test_time_domain_transform_preserves_energy():
    grid = make_grid(80.0, 120.0, 801)
    phi = gaussian_amplitude(grid, 100.0, 1.0)
    pulse = to_time_domain(phi, np.linspace(-10.0, 10.0, 2001))
    assert pulse.norm_squared() == pytest.approx(1.0, abs=1e-6)


def test_exponential_pulse_is_causal_with_unit_decay_envelope():
    grid = make_grid(1500.0, 2500.0, 10001)
    phi = exponential_pulse(grid, 2000.0, 1.0)
    pulse = to_time_domain(phi, [-3.0, 1.0])
    before, after = pulse.intensity()
    assert after == pytest.approx(2.0 * math.exp(-2.0), rel=2e-2)
    assert before < 1e-4 * after


def test_time_lens_output_intensity_does_not_depend_on_temporal_phase():
    grid = make_grid(80.0, 120.0, 401)
    phi = gaussian_amplitude(grid, 100.0, 1.0)
    times = np.linspace(-5.0, 5.0, 51)
    first = time_lens(phi, 2.0, 0.5, times)
    second = time_lens(phi, 2.0, -3.0, times)
    np.testing.assert_allclose(first.intensity(), second.intensity(), atol=1e-14)


def test_time_lens_requires_a_chirp():
    grid = make_grid(80.0, 120.0, 41)
    with pytest.raises(DomainError):
        time_lens(gaussian_amplitude(grid, 100.0, 1.0), 0.0, 1.0, [0.0])


def test_temporal_amplitude_requires_increasing_times():
    with pytest.raises(DomainError):
        TemporalAmplitude(np.array([0.0, 0.0]), np.array([1.0, 1.0]))


def test_amplitude_at_interpolates_and_vanishes_off_grid():
    grid = make_grid(80.0, 120.0, 401)
    phi = gaussian_amplitude(grid, 100.0, 1.0)
    on_grid = amplitude_at(phi, grid.omega[200])
    assert complex(on_grid) == pytest.approx(complex(phi.values[200]))
    assert complex(amplitude_at(phi, 150.0)) == 0.0


def test_time_window_validation_and_midpoint_samples():
    with pytest.raises(DomainError):
        TimeWindow(0.0, 0.0)
    with pytest.raises(DomainError):
        TimeWindow(0.0, 1.0, eta=1.5)
    window = TimeWindow(2.0, 1.0, n_time_samples=4)
    np.testing.assert_allclose(time_samples(window), [2.125, 2.375, 2.625, 2.875])
    assert window.midpoint == pytest.approx(2.5)
    assert TimeWindow.with_default_sampling(0.0, 10.0, 1.0).n_time_samples == 200
    assert TimeWindow.with_default_sampling(0.0, 0.1, 1.0).n_time_samples == 32


def test_density_operator_of_pure_state():
    grid = make_grid(80.0, 120.0, 201)
    rho = DensityOperator.from_amplitude(gaussian_amplitude(grid, 100.0, 2.0))
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)
    assert rho.hermiticity_residual() < 1e-15
    assert rho.eigenvalues()[-1] == pytest.approx(1.0, abs=1e-12)


def test_time_axis_validation():
    assert time_axis(0.0, 1.0, 3).tolist() == [0.0, 0.5, 1.0]
    with pytest.raises(DomainError):
        time_axis(1.0, 0.0, 5)


def test_strong_time_lens_maps_spectrum_to_time():
    alpha, sigma = 100.0, 1.0
    grid = make_grid(992.0, 1008.0, 4001)
    phi = gaussian_amplitude(grid, 1000.0, sigma)
    times = np.linspace(-200.0, 200.0, 81)
    lensed = time_lens(phi, alpha, 1.0 / alpha, times)
    nu = -times / alpha
    expected = np.exp(-(nu**2) / (2.0 * sigma**2)) / (math.sqrt(2.0 * math.pi) * sigma) / alpha
    np.testing.assert_allclose(lensed.intensity(), expected, rtol=1e-2)


def test_weak_chirp_time_lens_reduces_to_plain_transform():
    grid = make_grid(80.0, 120.0, 801)
    phi = gaussian_amplitude(grid, 100.0, 1.0)
    times = np.linspace(-10.0, 10.0, 2001)
    lensed = time_lens(phi, 1e-3, 0.0, times)
    plain = to_time_domain(phi, times)
    assert np.max(np.abs(lensed.values - plain.values)) <= 1e-3
    assert lensed.norm_squared() == pytest.approx(1.0, abs=1e-6)


def test_gaussians_two_widths_apart_overlap_by_root_e():
    grid = make_grid(80.0, 120.0, 801)
    first = gaussian_amplitude(grid, 99.0, 1.0)
    second = gaussian_amplitude(grid, 101.0, 1.0)
    assert inner_product(first, second) == pytest.approx(math.exp(-0.5), rel=1e-10)


def test_time_domain_obeys_the_shift_theorems():
    grid = make_grid(80.0, 120.0, 801)
    times = np.linspace(-5.0, 5.0, 41)
    phi = gaussian_amplitude(grid, 100.0, 1.0)
    shifted = gaussian_amplitude(grid, 102.0, 1.0)
    base = to_time_domain(phi, times).values
    np.testing.assert_allclose(to_time_domain(shifted, times).values, np.exp(-2j * times) * base, atol=1e-10)

    delay = 1.5
    delayed = phi.scaled(np.exp(1j * grid.omega * delay))
    np.testing.assert_allclose(to_time_domain(delayed, times + delay).values, base, atol=1e-10)
