import math
import sys
import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from spectral_povm.errors import DomainError, PhysicsRegimeWarning, UnitarityError
from spectral_povm.filters import (
    FilterChain,
    FilterSpec,
    apply_filter,
    effective_bandwidth,
    filter_from_table,
    filter_from_transmission,
    load_transmission_table,
    lorentzian_filter,
    read_numeric_table,
    unitarity_residuals,
)
from spectral_povm.spectral_core import gaussian_amplitude, make_grid


@pytest.fixture
def grid():
    return make_grid(1800.0, 2200.0, 4001)


def test_lorentzian_is_unitary_and_half_transmits_at_one_linewidth(grid):
    spec = lorentzian_filter(grid, 2000.0, 1.0)
    power, cross = unitarity_residuals(spec.transmission, spec.reflection)
    assert power < 1e-12 and cross < 1e-12
    assert complex(spec.transmission_at(2000.0)) == pytest.approx(1.0)
    for omega in (1999.0, 2001.0):
        assert abs(complex(spec.transmission_at(omega))) ** 2 == pytest.approx(0.5, abs=1e-14)
    assert spec.convention == "lorentzian"


def test_lorentzian_reflection_off_grid_is_complement():
    spec = lorentzian_filter(make_grid(1900.0, 2100.0, 201), 2000.0, 1.0)
    omega = 2000.37
    assert complex(spec.reflection_at(omega)) == pytest.approx(1.0 - complex(spec.transmission_at(omega)))


def test_wide_filter_warns_about_narrowband_assumption():
    grid = make_grid(10.0, 90.0, 81)
    with pytest.warns(PhysicsRegimeWarning):
        lorentzian_filter(grid, 50.0, 1.0)


def test_nonpositive_bandwidth_rejected(grid):
    with pytest.raises(DomainError):
        lorentzian_filter(grid, 2000.0, 0.0)


def test_non_unitary_pair_rejected(grid):
    half = np.full(grid.n_points, 0.5, dtype=np.complex128)
    with pytest.raises(UnitarityError):
        FilterSpec(grid, half, half, 2000.0, 1.0)


def test_effective_bandwidth_matches_truncated_lorentzian():
    grid = make_grid(1800.0, 2200.0, 4001)
    spec = lorentzian_filter(grid, 2000.0, 1.0)
    assert effective_bandwidth(spec) == pytest.approx(2.0 / math.pi * math.atan(200.0), abs=1e-4)


def test_tabulated_transmission_gets_phase_locked_reflection(grid):
    t_samples = np.exp(-((grid.omega - 2000.0) ** 2) / 8.0) * np.exp(0.3j)
    spec = filter_from_transmission(grid, t_samples)
    power, cross = unitarity_residuals(spec.transmission, spec.reflection)
    assert power < 1e-12 and cross < 1e-12
    assert spec.convention == "phase-locked"
    assert spec.omega0 == pytest.approx(2000.0)


def test_transmission_above_one_rejected(grid):
    with pytest.raises(DomainError):
        filter_from_transmission(grid, np.full(grid.n_points, 1.01))


def test_chain_ports_and_residual_conserve_probability(grid):
    chain = FilterChain.of(lorentzian_filter(grid, 2000.0, 1.0), lorentzian_filter(grid, 2003.0, 2.0))
    total = sum(np.abs(chain.port_coefficient(k)) ** 2 for k in range(len(chain)))
    total = total + np.abs(chain.residual_coefficient()) ** 2
    np.testing.assert_allclose(total, 1.0, atol=1e-12)
    with pytest.raises(IndexError):
        chain.port_coefficient(2)


def test_chain_rejects_mixed_grids(grid):
    other = make_grid(1800.0, 2200.0, 2001)
    with pytest.raises(ValueError):
        FilterChain.of(lorentzian_filter(grid, 2000.0, 1.0), lorentzian_filter(other, 2000.0, 1.0))


def test_apply_filter_splits_norm(grid):
    spec = lorentzian_filter(grid, 2000.0, 1.0)
    phi = gaussian_amplitude(grid, 2000.5, 1.5)
    transmitted, reflected = apply_filter(phi, spec)
    assert transmitted.norm_squared() + reflected.norm_squared() == pytest.approx(1.0, abs=1e-12)


class TransmissionTableTests(unittest.TestCase):
    def setUp(self) -> None:
        self.temp_dir = TemporaryDirectory()
        self.grid = make_grid(1900.0, 2100.0, 2001)
        self.model = lorentzian_filter(self.grid, 2000.0, 1.0)

    def tearDown(self) -> None:
        self.temp_dir.cleanup()

    def _write_table(self, omega: np.ndarray, transmission: np.ndarray) -> Path:
        path = Path(self.temp_dir.name) / "transmission.csv"
        lines = ["# omega, Re T, Im T"]
        lines += [f"{w:.17g}, {t.real:.17g}, {t.imag:.17g}" for w, t in zip(omega, transmission)]
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_table_on_the_grid_is_used_verbatim(self) -> None:
        path = self._write_table(self.grid.omega, self.model.transmission)
        omega, transmission = load_transmission_table(path)
        spec = filter_from_table(self.grid, omega, transmission)
        np.testing.assert_allclose(spec.transmission, self.model.transmission, atol=1e-15)

    def test_coarser_table_is_spline_interpolated(self) -> None:
        omega = np.linspace(1950.0, 2050.0, 1001)
        transmission = self.model.response(omega)
        spec = filter_from_table(self.grid, omega, transmission)
        points = np.array([1999.95, 2000.55, 2003.25])
        np.testing.assert_allclose(spec.transmission_at(points), self.model.transmission_at(points), atol=1e-4)
        self.assertEqual(complex(spec.transmission_at(2075.0)), 0.0)
        self.assertEqual(float(np.abs(spec.transmission[0])), 0.0)

    def test_malformed_table_rows_are_rejected(self) -> None:
        path = Path(self.temp_dir.name) / "broken.txt"
        path.write_text("2000 1.0\n")
        with self.assertRaises(DomainError):
            read_numeric_table(path, n_columns=3)
        path.write_text("2000 one 0\n")
        with self.assertRaises(DomainError):
            read_numeric_table(path, n_columns=3)

    def test_whitespace_separated_columns(self) -> None:
        path = Path(self.temp_dir.name) / "ws.txt"
        path.write_text("# comment\n1999.0  0.5 0.5\n\n2001.0 0.5 -0.5  # trailing\n")
        table = read_numeric_table(path, n_columns=3)
        self.assertEqual(table.shape, (2, 3))


if __name__ == "__main__":
    unittest.main()
