"""Run configuration: one JSON file, validated against the known sections.

Every key is optional; missing keys take the defaults in ``DEFAULTS``.
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import copy
import json
import os
from pathlib import Path

ENV_VAR = "SOFTGRIP_CONFIG"

DEFAULTS: dict = {
    "beam": {"E": 1.0, "I": 1.0, "L": 1.0},
    "routing": {"a": 0.0, "b": 1.0, "p": None, "k_t": 1.0},
    "load": {"F": 1.0},
    "sweep": {"points": 101, "slope": -1.0, "k_t": None},
    "oracle": {"stations": 4097, "levels": 3, "tolerance": 1e-12},
    "oscillator": {"inertia": 1e-4, "damping": 1.33e-4, "stiffness_damping": 1.70e-3,
                   "stiffness": 0.0220, "omega0": 410.24, "threshold": 3.0,
                   "duration": 6.0, "dt": 1e-4},
    "calibration": {"targets": [[7.16, 25.0, 2.5], [7.34, 19.0, 1.8]], "strike_gain": None,
                    "k_ratio_free": True, "bound": 0.1},
    "chain": {"length": 110.0, "n_seg": 100, "flexural_rigidity": 3260.0, "root_offset": 6.0,
              "offset_slope": 0.0, "t_max": 10.0, "steps": 21, "preload": 0.0,
              "gravity": False, "segment_mass": 0.0, "base_angle": 0.0},
    "gates": {"low": 60.0, "high": 200.0},
    "enhance": {"brighten_gamma": 0.5, "darken_gamma": 2.0, "equalize": True, "command": None},
    "pretension": {"ratios": [1.0, 1.25, 1.5, 2.0, 3.0], "actuator_gain": 45.0},
    "agent": {"max_retries": 2, "memory_k": 5, "vision_retries": 2, "reuse_history": True,
              "task": None},
    "paths": {"fixtures": None, "ledger": None, "lexicon": None},
}


class ConfigFileError(ValueError):
    pass


def merge(base: dict, override: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigFileError(f"unknown config key {where}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigFileError(f"config section {where}{key!r} must be an object")
            out[key] = merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def load_config(path=None) -> dict:
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return copy.deepcopy(DEFAULTS)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigFileError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigFileError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigFileError("config root must be an object")
    return merge(DEFAULTS, data)
