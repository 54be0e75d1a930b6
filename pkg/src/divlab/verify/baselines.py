"""Committed regression constants, keyed by check name and configuration key."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

from ..errors import ConfigError


def default_path() -> Path:
    return Path(str(resources.files("divlab") / "data" / "baselines.json"))


def load_baselines(path=None) -> dict:
    p = Path(path) if path is not None else default_path()
    if not p.exists():
        return {}
    try:
        doc = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"corrupted baseline file {p}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"corrupted baseline file {p}: top level must be an object")
    for check, table in doc.items():
        if not isinstance(table, dict):
            raise ConfigError(f"corrupted baseline file {p}: entry {check!r} is not an object")
        for key, value in table.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or not math.isfinite(value) or value < 0:
                raise ConfigError(f"corrupted baseline file {p}: {check}[{key}] = {value!r}")
    return doc


def lookup(baselines: dict, check: str, key: str):
    return baselines.get(check, {}).get(key)


def save_baselines(reports, path=None) -> Path:
    p = Path(path) if path is not None else default_path()
    doc = load_baselines(p) if p.exists() else {}
    for rep in reports:
        if rep.fixed_bound is not None or not rep.rows:
            continue
        doc.setdefault(rep.baseline_name, {})[rep.key] = rep.max_ratio
    p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return p
