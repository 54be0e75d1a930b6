"""Trial configuration documents."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from ..errors import ConfigError

POLICIES = ("random", "all-simple", "full")
CHECKS = ("main", "lemma_k1", "lemma3", "lemma4", "section4", "interp")
VARIANTS = ("whitney", "pointwise", "modulus", "full")


@dataclass(frozen=True)
class TrialConfig:
    m: int
    r: int
    trials: int = 100
    seed: int = 0
    min_gap: float = 1e-3
    multiplicity_policy: str = "random"
    functions: tuple = ()
    phis: tuple = ()
    tolerances: dict = field(default_factory=dict)
    check: str = "main"
    grid_x: int = 512
    grid_u: int = 256
    variant: Optional[str] = None
    k: Optional[int] = None
    interval: Optional[tuple] = None
    presets: bool = True

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "phis", tuple(self.phis))
        object.__setattr__(self, "tolerances", dict(self.tolerances))
        if self.interval is not None:
            object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        self.validate()

    def validate(self):
        for name in ("m", "r", "trials", "seed", "grid_x", "grid_u"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.r < 0 or self.m < 0:
            raise ConfigError("m and r must be nonnegative")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not 0 < self.min_gap < 1:
            raise ConfigError("min_gap must lie in (0, 1)")
        if self.multiplicity_policy not in POLICIES:
            raise ConfigError(f"multiplicity_policy must be one of {POLICIES}")
        if self.check not in CHECKS:
            raise ConfigError(f"check must be one of {CHECKS}, got {self.check!r}")
        if self.check in ("main", "lemma_k1") and self.m < self.r + 1:
            raise ConfigError(f"divided-difference trials need m >= r+1 (m={self.m}, r={self.r})")
        if self.check == "lemma_k1" and self.m != self.r + 1:
            raise ConfigError(f"lemma_k1 needs m = r+1 (m={self.m}, r={self.r})")
        if self.check in ("lemma3", "lemma4") and (self.k is None or self.k < 2 or self.m != self.r + self.k):
            raise ConfigError("lemma3/lemma4 need k >= 2 and m = r + k")
        if self.check == "section4" and (self.k is None or self.k < 2 or self.m != self.r + self.k):
            raise ConfigError("section4 needs k >= 2 and m = r + k")
        if self.check == "interp":
            if self.variant not in VARIANTS:
                raise ConfigError(f"interp needs variant in {VARIANTS}")
            if self.variant == "full":
                if (self.m % (self.r + 1)) or self.m // (self.r + 1) < 2:
                    raise ConfigError("full variant needs m = (r+1)(mu+1) with mu >= 1")
            elif self.m < max(self.r + 2, 2) and not (self.variant == "whitney" and self.m >= max(self.r + 1, 2)):
                raise ConfigError("interpolation checks need m >= r + 2")
        if self.interval is not None and (len(self.interval) != 2 or not self.interval[0] < self.interval[1]):
            raise ConfigError("interval must be [a, b] with a < b")
        if self.grid_x < 8 or self.grid_u < 1:
            raise ConfigError("grid sizes too small")

    @property
    def key(self) -> str:
        if self.check == "lemma4":
            return str(self.k)
        return f"{self.m},{self.r}"

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["functions"] = list(self.functions)
        d["phis"] = list(self.phis)
        if self.interval is not None:
            d["interval"] = list(self.interval)
        return d

    def replace(self, **kw) -> "TrialConfig":
        d = self.to_dict()
        d.update(kw)
        return TrialConfig(**d)


_FIELDS = {f.name for f in fields(TrialConfig)}


def config_from_dict(doc: dict) -> TrialConfig:
    if not isinstance(doc, dict):
        raise ConfigError("a trial config must be a JSON object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    missing = {"m", "r"} - set(doc)
    if missing:
        raise ConfigError(f"missing config fields: {sorted(missing)}")
    try:
        return TrialConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_configs(path) -> list:
    """Read one config object, a list of them, or ``{"suite": [...]}``."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from None
    if isinstance(doc, dict) and "suite" in doc:
        doc = doc["suite"]
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list):
        raise ConfigError("config document must be an object or a list")
    return [config_from_dict(d) for d in doc]
