"""Numeric defaults and tolerances for the spectral POVM toolkit."""

from __future__ import annotations

import math

# Unitarity is checked pointwise on every constructed filter.
UNITARITY_TOL = 1e-12
NORMALIZE_TOL = 1e-14
WEIGHT_FLOOR = 1e-300

# A Lorentzian with omega0 / gamma below this leaves the narrow-band regime.
NARROWBAND_RATIO = 100.0

# Time sampling of window elements: samples per 1/gamma, with a floor for short windows.
SAMPLES_PER_LIFETIME = 20
MIN_TIME_SAMPLES = 32  # replaces the floor of 1 in max(1, ceil(20 G dt))

# Grid spans in units of gamma.
FILTER_SPAN = 200.0
BASIS_SPAN = 40.0
BASIS_BIN_WIDTH = 2.0
CASCADE_SPAN = 60.0
HOM_SPAN = 20.0

CASCADE_POINTS = 1024
HERALD_POINTS = 768
HOM_POINTS = 1024
TWO_PHOTON_GUARD = 4096

# Amplitude matrices are assembled in blocks of at most this many complex entries.
BLOCK_ENTRIES = 4_000_000

# Locus refinement tolerance, relative to gamma.
LOCUS_XTOL = 1e-9

CSV_FLOAT_FORMAT = ".12g"

# povm-check thresholds.
CHECK_THRESHOLDS = {
    "unitarity": 1e-12,
    "completeness": 1e-10,
    "overlap": 1e-2,
    "w_factorization": 1e-8,
}
PURITY_AGREEMENT = 1e-2

# Largest eigenvalue allowed for a POVM element before it is reported as unphysical.
OPERATOR_BOUND_TOL = 1e-8


def default_time_samples(gamma: float, dt: float) -> int:
    """Return the default midpoint sample count for a window of length ``dt``."""

    return max(MIN_TIME_SAMPLES, math.ceil(SAMPLES_PER_LIFETIME * gamma * dt))


def format_float(value: float) -> str:
    """Render a float with the fixed precision used for every CSV cell."""

    text = format(float(value), CSV_FLOAT_FORMAT)
    return "0" if text == "-0" else text


__all__ = [
    "BASIS_BIN_WIDTH",
    "BASIS_SPAN",
    "CASCADE_POINTS",
    "CASCADE_SPAN",
    "CHECK_THRESHOLDS",
    "FILTER_SPAN",
    "HERALD_POINTS",
    "HOM_POINTS",
    "HOM_SPAN",
    "NARROWBAND_RATIO",
    "OPERATOR_BOUND_TOL",
    "PURITY_AGREEMENT",
    "TWO_PHOTON_GUARD",
    "UNITARITY_TOL",
    "default_time_samples",
    "format_float",
]
