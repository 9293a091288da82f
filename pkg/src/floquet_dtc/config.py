"""Scenario configuration: a flat key = value text format with a strict schema.

Every physical quantity has an explicit key; unknown keys are rejected in
strict mode, and parsing resolves all defaults so an emitted config always
round-trips to an identical spec.  The frequency convention is a mandatory
key: files never rely on a silent default for how omega maps to the half
period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .drive import FREQUENCY_CONVENTIONS

SCENARIO_KINDS = (
    "dtc_baseline", "freq_sweep", "flip_error_sweep", "initial_state_sweep",
    "effective_dynamics", "saturation_sweep", "alt_params",
)

SWEEP_KINDS = ("freq_sweep", "flip_error_sweep", "initial_state_sweep",
               "effective_dynamics", "saturation_sweep")

CADENCES = ("half_period", "period")
MODES = ("per_realization", "ensemble_mean")
EFFECTIVE_KIND_CHOICES = ("D0", "Dx", "both")


class ConfigError(ValueError):
    """Invalid configuration file or value; message names the offending key."""


@dataclass(frozen=True)
class ScenarioSpec:
    """Fully resolved scenario description; reruns from an equal spec and seed
    are bit-identical."""

    scenario: str
    j_z: float
    j_x: float
    b_z: float
    b_x: float
    frequency_convention: str
    omega_over_pi: float
    delta_r: float
    n_sites: int
    w: float
    theta_bar: float
    delta: float
    realizations: int
    horizon_periods: int
    seed: int
    cadence: str
    omega_over_pi_grid: tuple[float, ...] | None
    delta_r_grid: tuple[float, ...] | None
    theta_bar_grid: tuple[float, ...] | None
    rescale_ratio: float
    rescale_ratio_grid: tuple[float, ...] | None
    effective_kind: str
    dt: float
    total_time: float
    sample_interval: float
    d_threshold: float
    mz_threshold: float
    persistence_window: int
    ft_window_periods: int
    ft_grid_spacing: float
    exclude_dc: bool
    peak_width_bins: int
    f_mode: str
    tau_mode: str
    tau_c_mode: str
    series_cap: int
    early_stop: bool
    out_dir: str | None

    def half_period(self, omega_over_pi: float | None = None) -> float:
        """Half period T for the configured (or an overridden) frequency."""
        w = self.omega_over_pi if omega_over_pi is None else omega_over_pi
        if self.frequency_convention == "pi_over_T":
            return 1.0 / w
        return 2.0 / w


def _parse_str(text: str, key: str) -> str:
    return text.strip()


def _parse_float(text: str, key: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: expected a finite number, got {text!r}")
    return v


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _parse_bool(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {text!r}")


def _parse_float_list(text: str, key: str) -> tuple[float, ...]:
    items = [t for t in (s.strip() for s in text.split(",")) if t]
    if not items:
        raise ConfigError(f"{key}: expected a comma-separated list of numbers")
    return tuple(_parse_float(t, key) for t in items)


def _positive(v, key):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ConfigError(f"{key}: must be > 0, got {v}")
    return v


def _non_negative(v, key):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
        raise ConfigError(f"{key}: must be >= 0, got {v}")
    return v


def _finite(v, key):
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {v}")
    return v


def _choice(choices):
    def check(v, key):
        if v not in choices:
            raise ConfigError(f"{key}: must be one of {choices}, got {v!r}")
        return v
    return check


# key -> (parser, validator, default); None default means "no default" and the
# key stays optional unless required by the scenario kind.
_SCHEMA: dict[str, tuple] = {
    "scenario": (_parse_str, _choice(SCENARIO_KINDS), None),
    "j_z": (_parse_float, _finite, 0.399),
    "j_x": (_parse_float, _finite, 0.011),
    "b_z": (_parse_float, _finite, -0.016),
    "b_x": (_parse_float, _finite, -0.3),
    "frequency_convention": (_parse_str, _choice(FREQUENCY_CONVENTIONS), None),
    "omega_over_pi": (_parse_float, _positive, None),
    "half_period": (_parse_float, _positive, None),
    "delta_r": (_parse_float, _finite, 0.0),
    "n_sites": (_parse_int, lambda v, k: v if v >= 2 else _fail(k, "must be >= 2", v), 100),
    "w": (_parse_float, _non_negative, 0.1),
    "theta_bar": (_parse_float, _finite, math.pi),
    "s0_z": (_parse_float, lambda v, k: v if -1.0 <= v <= 1.0 else _fail(k, "must lie in [-1, 1]", v), None),
    "delta": (_parse_float, _non_negative, 0.01),
    "realizations": (_parse_int, _positive, 20),
    "horizon_periods": (_parse_int, _positive, 10000),
    "seed": (_parse_int, _non_negative, 12345),
    "cadence": (_parse_str, _choice(CADENCES), "half_period"),
    "omega_over_pi_grid": (_parse_float_list, None, None),
    "delta_r_grid": (_parse_float_list, None, None),
    "theta_bar_grid": (_parse_float_list, None, None),
    "rescale_ratio": (_parse_float, _positive, 1.0),
    "rescale_ratio_grid": (_parse_float_list, None, None),
    "effective_kind": (_parse_str, _choice(EFFECTIVE_KIND_CHOICES), "both"),
    "dt": (_parse_float, _positive, 0.02),
    "total_time": (_parse_float, _positive, 2000.0),
    "sample_interval": (_parse_float, _positive, 1.0),
    "d_threshold": (_parse_float, _positive, 0.9),
    "mz_threshold": (_parse_float, _positive, 0.05),
    "persistence_window": (_parse_int, _positive, 50),
    "ft_window_periods": (_parse_int, lambda v, k: v if v >= 2 else _fail(k, "must be >= 2", v), 500),
    "ft_grid_spacing": (_parse_float, lambda v, k: v if 0 < v <= 1e-3 else _fail(k, "must be in (0, 1e-3]", v), 1e-3),
    "exclude_dc": (_parse_bool, None, True),
    "peak_width_bins": (_parse_int, lambda v, k: v if v >= 1 and v % 2 == 1 else _fail(k, "must be odd and >= 1", v), 1),
    "f_mode": (_parse_str, _choice(MODES), "per_realization"),
    "tau_mode": (_parse_str, _choice(MODES), "per_realization"),
    "tau_c_mode": (_parse_str, _choice(MODES), "ensemble_mean"),
    "series_cap": (_parse_int, lambda v, k: v if v >= 3 else _fail(k, "must be >= 3", v), 50001),
    "early_stop": (_parse_bool, None, True),
    "out_dir": (_parse_str, None, None),
}

_GRID_KEY_FOR_KIND = {
    "freq_sweep": "omega_over_pi_grid",
    "flip_error_sweep": "delta_r_grid",
    "initial_state_sweep": "theta_bar_grid",
    "saturation_sweep": "omega_over_pi_grid",
}


def _fail(key, message, value):
    raise ConfigError(f"{key}: {message}, got {value}")


def parse_config_text(text: str, strict: bool = True) -> ScenarioSpec:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            raise ConfigError(f"{key}: duplicate key (line {lineno})")
        raw[key] = value

    unknown = sorted(set(raw) - set(_SCHEMA))
    if unknown and strict:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    for key in unknown:
        raw.pop(key)
    return resolve_spec(raw)


def parse_config(path, strict: bool = True) -> ScenarioSpec:
    """Read and validate a scenario config file."""
    return parse_config_text(Path(path).read_text(encoding="utf-8"), strict=strict)


def resolve_spec(raw: dict[str, str]) -> ScenarioSpec:
    """Validate raw key -> value strings and fill every default."""
    values: dict[str, object] = {}
    for key, (parser, validator, default) in _SCHEMA.items():
        if key in raw:
            v = parser(raw[key], key)
            if validator is not None:
                v = validator(v, key)
            values[key] = v
        else:
            values[key] = default

    if values["scenario"] is None:
        raise ConfigError("scenario: required key is missing")
    if values["frequency_convention"] is None:
        raise ConfigError("frequency_convention: required key is missing "
                          "(pi_over_T or two_pi_over_T)")

    # exactly one way to state the base frequency
    omega = values.pop("omega_over_pi")
    half_period = values.pop("half_period")
    if omega is not None and half_period is not None:
        raise ConfigError("omega_over_pi and half_period are mutually exclusive")
    if omega is None:
        if half_period is not None:
            factor = 1.0 if values["frequency_convention"] == "pi_over_T" else 2.0
            omega = factor / half_period
        else:
            omega = 1.0
    values["omega_over_pi"] = omega

    # theta_bar may be stated as the z projection instead
    s0_z = values.pop("s0_z")
    if s0_z is not None:
        if "theta_bar" in raw:
            raise ConfigError("theta_bar and s0_z are mutually exclusive")
        values["theta_bar"] = math.acos(s0_z)

    kind = values["scenario"]
    grid_key = _GRID_KEY_FOR_KIND.get(kind)
    if grid_key is not None and values[grid_key] is None:
        raise ConfigError(f"{grid_key}: required for scenario {kind}")
    for key in ("omega_over_pi_grid", "theta_bar_grid"):
        grid = values[key]
        if grid is not None and any(v <= 0 for v in grid) and key == "omega_over_pi_grid":
            raise ConfigError(f"{key}: frequencies must be > 0")

    n_ratio = int(round(values["sample_interval"] / values["dt"]))
    if n_ratio < 1 or abs(n_ratio * values["dt"] - values["sample_interval"]) > 1e-9:
        raise ConfigError("sample_interval: must be a positive multiple of dt")

    return ScenarioSpec(**values)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def emit_config(spec: ScenarioSpec) -> str:
    """Canonical text form; parse_config_text(emit_config(s)) == s."""
    lines = ["# floquet-dtc scenario configuration"]
    for f in fields(spec):
        v = getattr(spec, f.name)
        if v is None:
            continue
        lines.append(f"{f.name} = {_format_value(v)}")
    return "\n".join(lines) + "\n"
