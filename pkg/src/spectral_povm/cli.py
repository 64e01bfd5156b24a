"""Command-line entry point: ``povm <subcommand> --config <path>``.

Exit codes: 0 on success, 2 for configuration errors, 3 when a numerical check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np

from . import __version__
from .cascade import cascade_grid, cross_overlap, two_photon_projector
from .defaults import (
    BASIS_BIN_WIDTH,
    BASIS_SPAN,
    CASCADE_POINTS,
    CHECK_THRESHOLDS,
    OPERATOR_BOUND_TOL,
    PURITY_AGREEMENT,
    format_float,
)
from .errors import (
    ConfigError,
    DomainError,
    GridMismatchError,
    MemoryGuardError,
    OutcomeUnreachableError,
    ValidationFailure,
)
from .filters import FilterChain, lorentzian_filter, unitarity_residuals
from .herald import tradeoff_curve
from .hom import coincidence_map
from .povm_single import (
    boxcar_basis,
    closed_form_overlap,
    closed_form_purity,
    completeness_residual,
    d_eff,
    operator_bound,
    overlap_time,
    purity,
    window_element,
)
from .scenario import (
    ScenarioConfig,
    build_filters,
    build_joint_amplitude,
    build_state,
    build_window,
    load_scenario,
)
from .spectral_core import grid_around, time_axis, to_time_domain

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3

Cell = Union[float, int, str]


@dataclass
class Report:
    """Table produced by a subcommand plus any failed numerical checks."""

    header: list[str]
    rows: list[tuple[Cell, ...]] = field(default_factory=list)
    failures: list[ValidationFailure] = field(default_factory=list)


def _cell(value: Cell) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format_float(float(value))


def render_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.header)
    for row in report.rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def cmd_spectrum(config: ScenarioConfig, tolerance: Optional[float] = None) -> Report:
    """Time-dependent physical spectrum ``w |<Psi_t|phi>|^2`` for every port of the chain."""

    filters = build_filters(config)
    chain = FilterChain(tuple(filters))
    phi = build_state(config.state, config.grid)
    eta = build_window(config, filters[0].gamma).eta
    spectrum = config.spectrum
    try:
        times = time_axis(
            float(spectrum.get("t_min", -5.0)), float(spectrum.get("t_max", 30.0)), int(spectrum.get("n_times", 351))  # type: ignore[arg-type]
        )
    except DomainError as exc:
        raise ConfigError(str(exc), "spectrum") from exc

    # w |<Psi_t|phi>|^2 reduces to eta |(C_k phi)(t)|^2 in the time domain.
    densities = []
    for port in range(len(chain)):
        routed = phi.scaled(chain.port_coefficient(port))
        densities.append(eta * to_time_domain(routed, times).intensity())

    report = Report(["t", "port_index", "probability_density"])
    for j, t in enumerate(times):
        for port, density in enumerate(densities):
            report.rows.append((float(t), port, float(density[j])))
    return report


def cmd_purity_curve(config: ScenarioConfig, tolerance: Optional[float] = None) -> Report:
    """Numeric window purity against the closed form for each ``gamma_dt``."""

    spec = build_filters(config)[0]
    values = config.purity.get("gamma_dt")
    if not values:
        raise ConfigError("gamma_dt list is required", "purity", "gamma_dt")
    limit = PURITY_AGREEMENT if tolerance is None else tolerance

    report = Report(["gamma_dt", "purity_numeric", "purity_closed_form", "d_eff", "agreement"])
    for x in values:  # type: ignore[union-attr]
        if not x > 0:
            raise ConfigError(f"gamma_dt entries must be positive, got {x}", "purity", "gamma_dt")
        window = build_window(config, spec.gamma, dt=x / spec.gamma)
        element = window_element(spec, 0, window)
        numeric = purity(element)
        closed = closed_form_purity(x)
        agreement = abs(numeric - closed) / closed
        report.rows.append((x, numeric, closed, d_eff(element), agreement))
        if agreement > limit:
            report.failures.append(ValidationFailure(f"purity at gamma_dt={x:g}", agreement, limit))
    return report


def cmd_herald(config: ScenarioConfig, tolerance: Optional[float] = None) -> Report:
    """Purity/efficiency trade-off of the heralded photon over filter widths and windows.

    ``gammas`` rebuilds the Lorentzian of ``[filter.0]`` at each width; a tabulated
    filter has no width to sweep and is used as configured.
    """

    phi = build_joint_amplitude(config)
    base = build_filters(config, phi.herald_grid)[0]
    dts = config.herald.get("dts") or [math.inf]
    t0 = float(config.herald.get("t0", config.window.t0))  # type: ignore[arg-type]

    if base.convention == "lorentzian":
        family = []
        for gamma in config.herald.get("gammas") or [base.gamma]:  # type: ignore[union-attr]
            try:
                family.append(lorentzian_filter(phi.herald_grid, base.omega0, gamma))
            except DomainError as exc:
                raise ConfigError(str(exc), "herald", "gammas") from exc
    elif "gammas" in config.herald:
        raise ConfigError("a tabulated herald filter has no linewidth to sweep", "herald", "gammas")
    else:
        family = [base]

    report = Report(["gamma", "dt", "purity", "efficiency"])
    for spec in family:
        windows = []
        for dt in dts:  # type: ignore[union-attr]
            if math.isinf(dt):
                windows.append(None)
                continue
            windows.append(replace(build_window(config, spec.gamma, dt=dt), t0=t0))
        for point in tradeoff_curve(phi, [spec], windows):
            report.rows.append((point.gamma, point.dt, point.purity, point.efficiency))
    return report


def cmd_hom_map(config: ScenarioConfig, tolerance: Optional[float] = None) -> Report:
    """Coincidence probability density over the frequency square."""

    spec = build_filters(config)[0]
    phi1 = build_state(config.state, config.grid, "state")
    phi2 = build_state(config.state2, config.grid, "state2") if config.state2 is not None else phi1
    coincidences = coincidence_map(phi1, phi2, spec)
    omega = config.grid.omega
    report = Report(["omega", "omega_prime", "coincidence"])
    for i, w in enumerate(omega):
        for j, w_prime in enumerate(omega):
            report.rows.append((float(w), float(w_prime), float(coincidences[i, j])))
    return report


def _check(report: Report, name: str, value: float, threshold: float) -> None:
    passed = value <= threshold
    report.rows.append((name, value, threshold, "pass" if passed else "fail"))
    if not passed:
        report.failures.append(ValidationFailure(name, value, threshold))


def cmd_povm_check(config: ScenarioConfig, tolerance: Optional[float] = None) -> Report:
    """Self-consistency report on the first filter and the configured window."""

    filters = build_filters(config)
    spec = filters[0]
    thresholds = dict(CHECK_THRESHOLDS)
    if tolerance is not None:
        thresholds["overlap"] = tolerance
    report = Report(["check", "value", "threshold", "status"])

    worst = max(max(unitarity_residuals(f.transmission, f.reflection)) for f in filters)
    _check(report, "unitarity", worst, thresholds["unitarity"])

    gamma, omega0 = spec.gamma, spec.omega0
    spacing = float(config.check.get("basis_spacing", gamma / 10.0))  # type: ignore[arg-type]
    basis_grid = grid_around(omega0, BASIS_SPAN * gamma, spacing)
    residual = completeness_residual(
        boxcar_basis(basis_grid, BASIS_BIN_WIDTH * gamma), lorentzian_filter(basis_grid, omega0, gamma)
    )
    _check(report, "completeness", residual.diagonal, thresholds["completeness"])
    report.rows.append(("completeness_off_diagonal", residual.off_diagonal, "", "info"))

    n_overlap = int(config.check.get("overlap_points", 51))  # type: ignore[arg-type]
    deviation = 0.0
    for x in np.linspace(0.0, 5.0, n_overlap):
        dt = x / gamma
        numeric = overlap_time(spec, 0, 0.0, dt)
        deviation = max(deviation, abs(numeric - closed_form_overlap(gamma, omega0, dt)))
    _check(report, "overlap", deviation, thresholds["overlap"])

    bound = operator_bound(window_element(spec, 0, build_window(config, gamma)))
    _check(report, "operator_bound", bound, 1.0 + OPERATOR_BOUND_TOL)

    n_points = int(config.check.get("cascade_points", CASCADE_POINTS))  # type: ignore[arg-type]
    factorization = 0.0
    sweep = np.linspace(0.0, 3.0, 5) / gamma
    for detuning in (0.0, gamma, 10.0 * gamma):
        grid = cascade_grid(omega0, omega0 + detuning, gamma, n_points)
        first = lorentzian_filter(grid, omega0, gamma)
        second = lorentzian_filter(grid, omega0 + detuning, gamma)
        for t in sweep:
            for t_prime in sweep:
                projector = two_photon_projector(first, second, t, t_prime)
                w = projector.direct
                overlap = cross_overlap(first, second, t, t_prime)
                factorization = max(factorization, abs(projector.weight - w * (1.0 + abs(overlap) ** 2)) / projector.weight)
    _check(report, "w_factorization", factorization, thresholds["w_factorization"])
    return report


COMMANDS: dict[str, Callable[[ScenarioConfig, Optional[float]], Report]] = {
    "spectrum": cmd_spectrum,
    "purity-curve": cmd_purity_curve,
    "herald": cmd_herald,
    "hom-map": cmd_hom_map,
    "povm-check": cmd_povm_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="povm",
        description="POVMs of frequency-filtered, time-resolved photon detection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="repeat for debug output")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        summary = (command.__doc__ or "").strip().splitlines()[0]
        sub = subparsers.add_parser(name, help=summary, description=summary)
        sub.add_argument("--config", required=True, type=Path, help="scenario file (.ini or .json)")
        sub.add_argument("--out", type=Path, help="CSV destination (default: [output] path or stdout)")
        sub.add_argument("--tolerance", type=float, help="override the command's agreement threshold")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _emit(text: str, destination: Optional[Path], stdout: TextIO) -> None:
    if destination is None:
        stdout.write(text)
        return
    destination.parent.mkdir(parents=True, exist_ok=True)
    with destination.open("w", newline="") as handle:
        handle.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = load_scenario(args.config)
        report = COMMANDS[args.command](config, args.tolerance)
    except (ConfigError, DomainError, GridMismatchError, MemoryGuardError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationFailure, OutcomeUnreachableError) as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    logger.info("%s: %d row(s), %d failed check(s)", args.command, len(report.rows), len(report.failures))
    _emit(render_csv(report), args.out or config.output.path, sys.stdout)
    for failure in report.failures:
        print(f"validation failed: {failure}", file=sys.stderr)
    return EXIT_VALIDATION if report.failures else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
