"""Load scenario files (INI or JSON) into validated configuration objects."""

from __future__ import annotations

import configparser
import json
import logging
import math
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Mapping, Optional, Union

import numpy as np

from .errors import ConfigError, DomainError, GridMismatchError
from .filters import FilterSpec, filter_from_table, load_transmission_table, lorentzian_filter, read_numeric_table
from .herald import JointAmplitude, correlated_gaussian_jsa, load_jsa_table, separable_gaussian_jsa
from .spectral_core import (
    FrequencyGrid,
    SpectralAmplitude,
    TimeWindow,
    boxcar_amplitude,
    exponential_pulse,
    gaussian_amplitude,
    make_grid,
    spectral_amplitude,
)

logger = logging.getLogger(__name__)

Parser = Callable[[object], object]
RawSections = dict[str, dict[str, object]]

_FILTER_SECTION = re.compile(r"^filter\.(\d+)$")


def _as_float(value: object) -> float:
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    return float(value)  # type: ignore[arg-type]


def _as_int(value: object) -> int:
    number = _as_float(value)
    if not number.is_integer():
        raise ValueError(f"{value!r} is not an integer")
    return int(number)


def _as_str(value: object) -> str:
    if not isinstance(value, str) or not value.strip():
        raise ValueError("expected a nonempty string")
    return value.strip()


def _as_float_list(value: object) -> list[float]:
    items = value.split(",") if isinstance(value, str) else value
    if not isinstance(items, (list, tuple)) or not items:
        raise ValueError("expected a nonempty list of numbers")
    return [_as_float(item.strip() if isinstance(item, str) else item) for item in items]


_STATE_KEYS: dict[str, Parser] = {
    "preset": _as_str,
    "center": _as_float,
    "width": _as_float,
    "decay": _as_float,
    "lo": _as_float,
    "hi": _as_float,
    "table": _as_str,
    "pump_center": _as_float,
    "sigma_plus": _as_float,
    "sigma_minus": _as_float,
    "center_signal": _as_float,
}

SCHEMA: dict[str, dict[str, Parser]] = {
    "grid": {"omega_min": _as_float, "omega_max": _as_float, "n_points": _as_int},
    "filter": {"omega0": _as_float, "gamma": _as_float, "table": _as_str},
    "state": _STATE_KEYS,
    "state2": _STATE_KEYS,
    "window": {"t0": _as_float, "dt": _as_float, "eta": _as_float, "eta1": _as_float, "n_time_samples": _as_int},
    "spectrum": {"t_min": _as_float, "t_max": _as_float, "n_times": _as_int},
    "purity": {"gamma_dt": _as_float_list},
    "herald": {
        "gammas": _as_float_list,
        "dts": _as_float_list,
        "t0": _as_float,
        "signal_omega_min": _as_float,
        "signal_omega_max": _as_float,
        "signal_n_points": _as_int,
    },
    "check": {"basis_spacing": _as_float, "cascade_points": _as_int, "overlap_points": _as_int},
    "output": {"path": _as_str, "format": _as_str, "frequency_unit": _as_str},
}

REQUIRED = {"grid": ("omega_min", "omega_max", "n_points")}


@dataclass(frozen=True)
class FilterSection:
    index: int
    omega0: Optional[float] = None
    gamma: Optional[float] = None
    table: Optional[Path] = None


@dataclass(frozen=True)
class StateSection:
    preset: str
    params: dict[str, float] = field(default_factory=dict)
    table: Optional[Path] = None


@dataclass(frozen=True)
class WindowSection:
    t0: float = 0.0
    dt: float = 1.0
    eta: float = 1.0
    eta1: Optional[float] = None
    n_time_samples: Optional[int] = None


@dataclass(frozen=True)
class OutputSection:
    path: Optional[Path] = None
    format: str = "csv"
    frequency_unit: str = "gamma"


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario: every section typed, every path resolved."""

    grid: FrequencyGrid
    filters: tuple[FilterSection, ...]
    state: Optional[StateSection]
    state2: Optional[StateSection]
    window: WindowSection
    output: OutputSection
    spectrum: dict[str, object] = field(default_factory=dict)
    purity: dict[str, object] = field(default_factory=dict)
    herald: dict[str, object] = field(default_factory=dict)
    check: dict[str, object] = field(default_factory=dict)
    source: Optional[Path] = None


def _read_raw(path: Path) -> RawSections:
    if not path.exists():
        raise ConfigError(f"scenario file {path} not found")
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
            raise ConfigError("JSON scenario must map section names to objects")
        return {str(name): dict(body) for name, body in data.items()}
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"invalid scenario file: {exc}") from exc
    return {name: dict(parser.items(name)) for name in parser.sections()}


def _schema_for(section: str) -> dict[str, Parser]:
    if _FILTER_SECTION.match(section):
        return SCHEMA["filter"]
    if section not in SCHEMA:
        raise ConfigError("unknown section", section)
    return SCHEMA[section]


def validate_sections(raw: Mapping[str, Mapping[str, object]]) -> dict[str, dict[str, object]]:
    """Parse every value against the schema, rejecting unknown sections and keys."""

    parsed: dict[str, dict[str, object]] = {}
    for section, body in raw.items():
        schema = _schema_for(section)
        values: dict[str, object] = {}
        for key, value in body.items():
            if key not in schema:
                raise ConfigError("unknown key", section, key)
            try:
                values[key] = schema[key](value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value {value!r}: {exc}", section, key) from exc
        parsed[section] = values
    for section, keys in REQUIRED.items():
        for key in keys:
            if key not in parsed.get(section, {}):
                raise ConfigError("missing required key", section, key)
    return parsed


def _resolve(base: Optional[Path], value: object) -> Path:
    path = Path(str(value))
    return path if path.is_absolute() or base is None else base / path


def _state_section(values: Mapping[str, object], base: Optional[Path], name: str) -> StateSection:
    if "preset" not in values:
        raise ConfigError("missing required key", name, "preset")
    params = {k: float(v) for k, v in values.items() if k not in ("preset", "table")}  # type: ignore[arg-type]
    table = _resolve(base, values["table"]) if "table" in values else None
    return StateSection(str(values["preset"]), params, table)


def parse_sections(raw: Mapping[str, Mapping[str, object]], source: Optional[Path] = None) -> ScenarioConfig:
    parsed = validate_sections(raw)
    base = source.parent if source is not None else None

    grid_values = parsed["grid"]
    try:
        grid = make_grid(grid_values["omega_min"], grid_values["omega_max"], grid_values["n_points"])  # type: ignore[arg-type]
    except DomainError as exc:
        raise ConfigError(str(exc), "grid") from exc

    filters: list[FilterSection] = []
    for section, values in parsed.items():
        match = _FILTER_SECTION.match(section)
        if not match:
            continue
        table = _resolve(base, values["table"]) if "table" in values else None
        if table is None and not {"omega0", "gamma"} <= values.keys():
            raise ConfigError("needs omega0 and gamma, or a table", section)
        filters.append(FilterSection(int(match.group(1)), values.get("omega0"), values.get("gamma"), table))  # type: ignore[arg-type]
    filters.sort(key=lambda item: item.index)
    if [f.index for f in filters] != list(range(len(filters))):
        raise ConfigError("filter sections must be numbered 0, 1, 2, ... without gaps", "filter")

    window = WindowSection(**parsed.get("window", {}))  # type: ignore[arg-type]
    output_values = dict(parsed.get("output", {}))
    if "path" in output_values:
        output_values["path"] = _resolve(base, output_values["path"])
    output = OutputSection(**output_values)  # type: ignore[arg-type]
    if output.format != "csv":
        raise ConfigError(f"unsupported format {output.format!r}", "output", "format")

    return ScenarioConfig(
        grid=grid,
        filters=tuple(filters),
        state=_state_section(parsed["state"], base, "state") if "state" in parsed else None,
        state2=_state_section(parsed["state2"], base, "state2") if "state2" in parsed else None,
        window=window,
        output=output,
        spectrum=parsed.get("spectrum", {}),
        purity=parsed.get("purity", {}),
        herald=parsed.get("herald", {}),
        check=parsed.get("check", {}),
        source=source,
    )


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a scenario file; ``.json`` selects JSON, anything else INI."""

    path = Path(path)
    config = parse_sections(_read_raw(path), source=path)
    logger.info("Loaded scenario %s: %d filter(s), grid of %d points", path, len(config.filters), config.grid.n_points)
    return config


@contextmanager
def _config_errors(section: str) -> Iterator[None]:
    """Re-raise numerical precondition failures as configuration errors."""

    try:
        yield
    except (DomainError, GridMismatchError, OSError) as exc:
        raise ConfigError(str(exc), section) from exc


def build_filter(section: FilterSection, grid: FrequencyGrid) -> FilterSpec:
    with _config_errors(f"filter.{section.index}"):
        if section.table is not None:
            omega, transmission = load_transmission_table(section.table)
            return filter_from_table(grid, omega, transmission)
        return lorentzian_filter(grid, section.omega0, section.gamma)  # type: ignore[arg-type]


def build_filters(config: ScenarioConfig, grid: Optional[FrequencyGrid] = None) -> list[FilterSpec]:
    if not config.filters:
        raise ConfigError("at least one [filter.N] section is required", "filter")
    return [build_filter(section, grid or config.grid) for section in config.filters]


def _param(state: StateSection, key: str, name: str) -> float:
    if key not in state.params:
        raise ConfigError(f"preset {state.preset!r} needs {key}", name, key)
    return state.params[key]


def build_state(state: Optional[StateSection], grid: FrequencyGrid, name: str = "state") -> SpectralAmplitude:
    """Single-photon amplitude from a preset or an ``omega, Re phi, Im phi`` table."""

    if state is None:
        raise ConfigError("section is required for this command", name)
    with _config_errors(name):
        if state.preset == "gaussian":
            return gaussian_amplitude(grid, _param(state, "center", name), _param(state, "width", name))
        if state.preset == "exponential":
            return exponential_pulse(grid, _param(state, "center", name), _param(state, "decay", name))
        if state.preset == "boxcar":
            return boxcar_amplitude(grid, _param(state, "lo", name), _param(state, "hi", name))
        if state.preset == "table":
            if state.table is None:
                raise ConfigError("preset 'table' needs a table path", name, "table")
            table = read_numeric_table(state.table, n_columns=3)
            real = np.interp(grid.omega, table[:, 0], table[:, 1], left=0.0, right=0.0)
            imag = np.interp(grid.omega, table[:, 0], table[:, 2], left=0.0, right=0.0)
            return spectral_amplitude(grid, real + 1j * imag)
    raise ConfigError(f"unknown single-photon preset {state.preset!r}", name, "preset")


def herald_grids(config: ScenarioConfig) -> tuple[FrequencyGrid, FrequencyGrid]:
    herald = config.herald
    if {"signal_omega_min", "signal_omega_max", "signal_n_points"} <= herald.keys():
        with _config_errors("herald"):
            signal = make_grid(herald["signal_omega_min"], herald["signal_omega_max"], herald["signal_n_points"])  # type: ignore[arg-type]
        return config.grid, signal
    return config.grid, config.grid


def build_joint_amplitude(config: ScenarioConfig) -> JointAmplitude:
    """Pair amplitude from the ``[state]`` section."""

    state = config.state
    if state is None:
        raise ConfigError("section is required for this command", "state")
    grids = herald_grids(config)
    with _config_errors("state"):
        if state.preset == "correlated_gaussian":
            return correlated_gaussian_jsa(
                grids,
                _param(state, "pump_center", "state"),
                _param(state, "sigma_plus", "state"),
                _param(state, "sigma_minus", "state"),
            )
        if state.preset == "separable_gaussian":
            center = _param(state, "center", "state")
            return separable_gaussian_jsa(
                grids, center, state.params.get("center_signal", center), _param(state, "width", "state")
            )
        if state.preset == "jsa_table":
            if state.table is None:
                raise ConfigError("preset 'jsa_table' needs a table path", "state", "table")
            return load_jsa_table(state.table)
    raise ConfigError(f"unknown pair preset {state.preset!r}", "state", "preset")


def build_window(config: ScenarioConfig, gamma: float, dt: Optional[float] = None) -> TimeWindow:
    section = config.window
    duration = section.dt if dt is None else dt
    with _config_errors("window"):
        if section.n_time_samples is not None:
            return TimeWindow(section.t0, duration, section.eta, section.n_time_samples)
        if not math.isfinite(duration):
            raise DomainError("dt", duration, "window duration must be finite")
        return TimeWindow.with_default_sampling(section.t0, duration, gamma, section.eta)


__all__ = [
    "FilterSection",
    "OutputSection",
    "SCHEMA",
    "ScenarioConfig",
    "StateSection",
    "WindowSection",
    "build_filter",
    "build_filters",
    "build_joint_amplitude",
    "build_state",
    "build_window",
    "herald_grids",
    "load_scenario",
    "parse_sections",
    "validate_sections",
]
