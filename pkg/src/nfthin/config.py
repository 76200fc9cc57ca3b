"""JSON run configuration: flat sections per module, CLI overrides on top."""

from __future__ import annotations

import json
from pathlib import Path


class ConfigError(Exception):
    "Malformed configuration file or override; carries a field diagnostic."


# defaults double as the schema: section -> key -> default value
DEFAULTS = {
    "benchmark": {
        "carrier_hz": 30e9,
        "n_dense": 320,
        "n_active": 32,
        "k_users": 16,
        "snr_db": 20.0,
        "noise_variance": 1.0,
        "angle_bound_deg": 60.0,
        "n_trials": 500,
        "schemes": ["FULA", "MULA", "STA", "GTA", "PTA", "SULA", "HULA"],
        "per_user_power": True,
        "workers": 1,
    },
    "pso": {
        "n_particles": 50,
        "n_iterations": 100,
        "inertia_start": 0.9,
        "inertia_end": 0.4,
        "cognitive": 1.49445,
        "social": 1.49445,
        "velocity_clamp": 0.2,
    },
    "gta": {
        "coverage_deg": [0.0, 20.0, -20.0, 40.0, -40.0, 60.0, -60.0],
        "tau_psll_db": -10.0,
        "psll_penalty": 10.0,
    },
    "pta": {
        "ensemble_size": 100,
    },
    "mula": {
        "bound_wavelengths": 80.0,
        "min_spacing_wavelengths": 0.5,
    },
    "beam": {
        "angle_points": 8192,
        "range_points": 4096,
        "exclusion_factor": 1.0,
        "floor_db": -80.0,
    },
    "fig1": {
        "carrier_hz": 15e9,
        "n_elements": 256,
        "spacing_wavelengths": 2.0,
        "focus_deg": 0.0,
        "focus_range_divisor": 30.0,
    },
    "fig4": {
        "k_values": [2, 4, 8, 16, 24, 32],
    },
}


def default_config() -> dict:
    return {s: dict(v) for s, v in DEFAULTS.items()}


def _coerce(section: str, key: str, value, default):
    "Parse `value` (possibly a string from the CLI) to the default's type."
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("1", "true", "yes", "on"):
            return True
        if str(value).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{section}.{key}: expected a boolean, got {value!r}")
    if isinstance(default, int) and not isinstance(default, bool):
        try:
            f = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
        if f != int(f):
            raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
        return int(f)
    if isinstance(default, float):
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    if isinstance(default, list):
        if isinstance(value, list):
            return value
        parts = [p for p in str(value).split(",") if p != ""]
        kind = type(default[0]) if default else str
        try:
            return [kind(p) for p in parts]
        except ValueError:
            raise ConfigError(f"{section}.{key}: cannot parse list {value!r}")
    return value


def load_config(path=None) -> dict:
    "Defaults merged with a JSON file; unknown sections or keys are rejected."
    cfg = default_config()
    if path is None:
        return cfg
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object of sections")
    for section, entries in data.items():
        if section not in cfg:
            raise ConfigError(f"{path}: unknown section {section!r} "
                              f"(known: {', '.join(sorted(cfg))})")
        if not isinstance(entries, dict):
            raise ConfigError(f"{path}: section {section!r} must be an object")
        for key, value in entries.items():
            if key not in cfg[section]:
                raise ConfigError(
                    f"{path}: unknown key {section}.{key} "
                    f"(known: {', '.join(sorted(cfg[section]))})")
            cfg[section][key] = _coerce(section, key, value, DEFAULTS[section][key])
    return cfg


def apply_overrides(cfg: dict, overrides) -> dict:
    "Apply `section.key=value` strings on top of the merged config."
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        target, value = item.split("=", 1)
        if "." not in target:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        section, key = target.split(".", 1)
        if section not in cfg:
            raise ConfigError(f"override: unknown section {section!r}")
        if key not in cfg[section]:
            raise ConfigError(f"override: unknown key {section}.{key}")
        cfg[section][key] = _coerce(section, key, value, DEFAULTS[section][key])
    return cfg
