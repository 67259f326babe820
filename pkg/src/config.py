"""This module contains the Config class which is used to store the configuration values for the application."""
import json
import math
import os
import re
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.errors import ConfigError, UsageError
from src.feasibility import DEFAULT_MAX_ROWS, DEFAULT_THRESHOLD, SweepGrid
from src.logger import logger

OUTPUT_DIR_ENV = "SUPERDET_OUTPUT_DIR"

UNIT_SECONDS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15,
                "m": 60.0, "h": 3600.0, "d": 86400.0}


def convert_to_seconds(value, key_name: str = "value") -> float:
    """
    Converts a duration to seconds.

    Args:
        value: A number of seconds, "inf", or a string <number><unit> with unit one of
            s, ms, us, ns, ps, fs, m, h, d (e.g. 1ns, 6.67fs, 2.5us).

    Returns:
        The duration in seconds.

    Raises:
        ValueError: If the string is not in the correct format or contains an invalid unit.
    """
    # If the value is already a number, return it
    try:
        return float(value)
    except (TypeError, ValueError):
        pass

    match = re.match(r'^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([a-zµ]+)\s*$', str(value).lower())
    if not match or match.group(2) not in UNIT_SECONDS:
        raise ValueError(f"{key_name} must be a number of seconds or <number><unit> "
                         f"with unit in {', '.join(UNIT_SECONDS)} (e.g. 1ns, 6.67fs); got {value!r}")

    return float(match.group(1)) * UNIT_SECONDS[match.group(2)]


def _to_int(value, key_name: str) -> int:
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{key_name} must be an integer (got {value!r})")
    return int(number)


def _to_bool(value, key_name: str) -> bool:
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("1", "true", "yes", "on"):
        return True
    if str(value).lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{key_name} must be true or false (got {value!r})")


def _to_float(value, key_name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{key_name} must be a number (got {value!r})") from None


def _to_str(value, key_name: str) -> str:
    return str(value)


def _choice(*options: str) -> Callable[[Any, str], str]:
    def cast(value, key_name: str) -> str:
        if str(value) not in options:
            raise ValueError(f"{key_name} must be one of {', '.join(options)} (got {value!r})")
        return str(value)
    cast.choices = options
    return cast


def option(default, cast, help_text: str, required: bool = False):
    """A configuration field that doubles as a command-line flag."""
    return field(default=default, metadata={"cast": cast, "help": help_text, "required": required})


@dataclass
class GeneralConfig:
    """Settings shared by every subcommand."""
    log_level: str = option("INFO", _choice("DEBUG", "INFO", "WARN", "WARNING", "ERROR"), "log level")
    log_file: Optional[str] = option(None, _to_str, "rotating log file (console only when unset)")
    output_dir: str = option(".", _to_str, f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    workers: int = option(1, _to_int, "ensemble worker threads; results do not depend on it")


@dataclass
class SimulationConfig:
    """This class is used to store the configuration values for the simulate subcommand."""
    model: str = option("qm", _choice("qm", "hv"), "generating model: qm or hv (hidden variable)")
    theta_deg: float = option(90.0, _to_float, "angle between the two observables in degrees")
    mode: str = option("recording", _choice("recording", "transmissive"), "measurement mode")
    runs: int = option(1000, _to_int, "ensemble size")
    seed: int = option(0, _to_int, "master seed of the ensemble")
    max_steps: int = option(22, _to_int, "measurements per run")
    dt: float = option(1.0, convert_to_seconds, "interval between measurements (seconds or e.g. 6.67fs)")
    tau: float = option(math.inf, convert_to_seconds, "hidden-variable autocorrelation time (seconds, e.g. 63ns, or inf)")
    tau_steps: Optional[float] = option(None, _to_float, "autocorrelation time in units of dt (overrides --tau)")
    kernel: str = option("redraw", _choice("redraw", "diffusion"), "disturbance kernel")
    diffusion_angle_deg: float = option(5.0, _to_float, "rotation angle of one diffusion disturbance in degrees")
    initial: Optional[str] = option(None, _to_str, "initial state or lambda: +a, -a, +b, -b, pass, mixed, "
                                                   "uniform or x,y,z (default +a for qm, uniform for hv)")
    pass_outcome: int = option(1, _to_int, "outcome that lets the particle pass in transmissive mode (+1 or -1)")


@dataclass
class AnalysisConfig:
    """This class is used to store the configuration values for the analyze subcommand."""
    input: Optional[str] = option(None, _to_str, "ensemble JSON file", required=True)
    label: str = option("A", _to_str, "observable to analyse")
    max_kappa: int = option(10, _to_int, "largest repetition lag")
    estimator: str = option("first", _choice("first", "lagged"), "correlation with the first measurement or lagged")
    fit_method: str = option("mle", _choice("log_linear", "mle"), "exponential fit method")
    bootstrap: int = option(1000, _to_int, "bootstrap resamples for the confidence interval")
    confidence: float = option(0.95, _to_float, "confidence level of the interval")
    seed: int = option(0, _to_int, "bootstrap seed")
    accept_survivorship_bias: bool = option(False, _to_bool, "allow transmissive (post-selected) ensembles")


@dataclass
class HypothesisConfig:
    """This class is used to store the configuration values for the test subcommand."""
    input: Optional[str] = option(None, _to_str, "ensemble JSON file", required=True)
    label: Optional[str] = option(None, _to_str, "observable to test (default: the first observable)")
    alpha: float = option(0.05, _to_float, "significance level")
    bootstrap: int = option(1000, _to_int, "bootstrap resamples of the null distribution")
    seed: int = option(0, _to_int, "bootstrap seed")


@dataclass
class FeasibilityConfig:
    """This class is used to store the configuration values for the feasibility subcommand."""
    n_atoms: float = option(1e15, _to_float, "number of detector atoms N")
    band_gap_ev: float = option(1.0, _to_float, "band gap in eV")
    temperature_k: float = option(300.0, _to_float, "temperature in kelvin")
    recombination_ns: float = option(1.0, _to_float, "electron-hole recombination time in ns")
    mirror_separation_um: float = option(1.0, _to_float, "mirror separation in micrometers")
    threshold: float = option(DEFAULT_THRESHOLD, _to_float, "required ratio of tau_tilde to bounce time")


@dataclass
class SweepConfig:
    """This class is used to store the configuration values for the sweep subcommand."""
    grid: Optional[str] = option(None, _to_str, "JSON file describing the grid axes", required=True)
    threshold: float = option(DEFAULT_THRESHOLD, _to_float, "required ratio of tau_tilde to bounce time")
    max_rows: int = option(DEFAULT_MAX_ROWS, _to_int, "refuse grids with more rows")


SUBCOMMANDS = {
    "simulate": SimulationConfig,
    "analyze": AnalysisConfig,
    "test": HypothesisConfig,
    "feasibility": FeasibilityConfig,
    "sweep": SweepConfig,
}


def known_keys() -> set:
    keys = {f.name for f in fields(GeneralConfig)}
    for section in SUBCOMMANDS.values():
        keys.update(f.name for f in fields(section))
    return keys


@dataclass
class Config:
    """This class is used to store the configuration values for the application."""
    subcommand: str
    general: GeneralConfig
    job: Any

    @classmethod
    def from_values(cls, subcommand: str, values: Dict[str, Any]) -> "Config":
        """
        Builds the configuration of one subcommand from merged file and command-line values.

        Raises:
            UsageError: If a required setting is missing.
            ConfigError: If a value cannot be converted.
        """
        if subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {subcommand!r}")

        defaults = {"output_dir": os.environ.get(OUTPUT_DIR_ENV) or "."}
        general = _parse_section(GeneralConfig, values, defaults)
        job = _parse_section(SUBCOMMANDS[subcommand], values, {})
        return cls(subcommand, general, job)

    def resolved(self) -> Dict[str, Any]:
        """Every setting of this run, enough to repeat it."""
        data = {f.name: getattr(self.general, f.name) for f in fields(GeneralConfig)}
        data.update({f.name: getattr(self.job, f.name) for f in fields(self.job)})
        return {k: _json_safe(v) for k, v in data.items()}


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _parse_section(section, values: Dict[str, Any], defaults: Dict[str, Any]):
    parsed = {}
    for f in fields(section):
        if values.get(f.name) is None and f.metadata.get("required"):
            raise UsageError(f"missing required flag --{f.name.replace('_', '-')}")
        parsed[f.name] = _get_value_or_default(values, f.name, defaults.get(f.name, f.default), f.metadata["cast"])
    return section(**parsed)


def _get_value_or_default(config: Dict[str, Any], key: str, default: Any, cast: Callable) -> Any:
    if config.get(key) is None:
        logger.debug("[CONFIG] Missing configuration key: %s. Using default value: %s", key, default)
        return default

    try:
        return cast(config[key], key)
    except ValueError as err:
        raise ConfigError(f"invalid value for {key}: {err}") from err


def load_config_file(path: str, subcommand: str) -> Dict[str, Any]:
    """
    Reads a flat JSON object of settings, or the resolved configuration of a run manifest.

    Keys may use dashes or underscores.

    Raises:
        ConfigError: If the file is unreadable, not a flat object, has unknown keys, or is a
            manifest of another subcommand.
    """
    try:
        with open(path, encoding="utf-8") as file:
            data = json.load(file)
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed config file {path}: {err}") from err

    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")

    if "resolved_config" in data:
        if data.get("subcommand") != subcommand:
            raise ConfigError(f"manifest {path} belongs to subcommand {data.get('subcommand')!r}, not {subcommand!r}")
        data = data["resolved_config"]

    settings = {}
    allowed = known_keys()
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in allowed:
            raise ConfigError(f"unknown key {key!r} in config file {path}")
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config key {key!r} in {path} must be a scalar")
        settings[name] = value

    logger.debug("[CONFIG] Loaded %d settings from %s.", len(settings), path)
    return settings


GRID_AXES = {
    "n_atoms": "n_atoms",
    "band_gap_ev": "band_gap",
    "temperature_k": "temperature",
    "recombination_time_s": "recombination_time",
    "mirror_separation_m": "mirror_separation",
}

GRID_DEFAULTS = {"n_atoms": [1e15], "band_gap_ev": [1.0], "temperature_k": [300.0],
                 "recombination_time_s": [1e-9], "mirror_separation_m": [1e-6]}


def _axis_value(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"grid axis {key} has non-numeric value {value!r}")
    return float(value)


def _expand_axis(key: str, axis) -> List[float]:
    if isinstance(axis, (int, float)) and not isinstance(axis, bool):
        return [float(axis)]
    if isinstance(axis, list):
        return [_axis_value(key, v) for v in axis]
    if isinstance(axis, dict):
        try:
            start, stop, num = (_axis_value(key, axis[bound]) for bound in ("start", "stop", "num"))
            num = int(num)
        except (KeyError, TypeError, ValueError, OverflowError) as err:
            raise ConfigError(f"grid axis {key} needs numeric start, stop and num") from err
        if num < 1:
            raise ConfigError(f"grid axis {key} needs num >= 1 (got {num})")
        scale = axis.get("scale", "linear")
        if scale == "linear":
            return [float(v) for v in np.linspace(start, stop, num)]
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"grid axis {key} needs positive bounds for a log scale")
            return [float(v) for v in np.logspace(math.log10(start), math.log10(stop), num)]
        raise ConfigError(f"grid axis {key} has unknown scale {scale!r} (use linear or log)")
    raise ConfigError(f"grid axis {key} must be a number, a list or a range object")


def load_sweep_grid(path: str) -> SweepGrid:
    """
    Reads a sweep grid file: a JSON object mapping axis names to values.

    Axes are n_atoms, band_gap_ev, temperature_k, recombination_time_s and mirror_separation_m;
    each is a number, a list, or {"start", "stop", "num", "scale": "linear" | "log"}. Missing
    axes take a single default value.
    """
    try:
        with open(path, encoding="utf-8") as file:
            data = json.load(file)
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed grid file {path}: {err}") from err

    if not isinstance(data, dict):
        raise ConfigError(f"grid file {path} must contain a JSON object")
    unknown = set(data) - set(GRID_AXES)
    if unknown:
        raise ConfigError(f"unknown grid axes {sorted(unknown)} in {path}")

    axes = {}
    for key, name in GRID_AXES.items():
        if key not in data:
            logger.debug("[CONFIG] Grid axis %s not given. Using default value: %s", key, GRID_DEFAULTS[key])
        axes[name] = _expand_axis(key, data.get(key, GRID_DEFAULTS[key]))
    return SweepGrid(**axes)
