"""Runtime configuration: caps and defaults.

Values come from (lowest to highest precedence) the built-in defaults, a
JSON config file, and environment variables ``KMATRIX_<NAME>``.
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

DEFAULTS: dict[str, Any] = {
    "unit_cap": 2**20,  # max ring order for element / unit enumeration
    "enum_cap": 2**20,  # max order of any enumerated group
    "k1_cap": 2**16,  # max unit-group order for the K1 oracle
    "mode": "integral",
    "workers": 0,  # 0 -> os.cpu_count()
}

_ENV_PREFIX = "KMATRIX_"
_current: dict[str, Any] = dict(DEFAULTS)


def _coerce(key: str, raw: str) -> Any:
    default = DEFAULTS.get(key)
    if isinstance(default, int):
        return int(raw, 0)
    return raw


def load(path: str | os.PathLike | None = None, env: dict[str, str] | None = None) -> dict[str, Any]:
    """Rebuild the active configuration and return a copy of it."""
    cfg = dict(DEFAULTS)
    if path is None:
        path = (env or os.environ).get(_ENV_PREFIX + "CONFIG")
    if path:
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key, val in (env if env is not None else os.environ).items():
        if key.startswith(_ENV_PREFIX):
            name = key[len(_ENV_PREFIX):].lower()
            if name in DEFAULTS:
                cfg[name] = _coerce(name, val)
    _current.clear()
    _current.update(cfg)
    return dict(cfg)


def get(key: str) -> Any:
    return _current[key]


def set_value(key: str, value: Any) -> None:
    if key not in DEFAULTS:
        raise KeyError(key)
    _current[key] = value


def snapshot() -> dict[str, Any]:
    return dict(_current)


load()
