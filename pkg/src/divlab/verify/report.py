"""Verification reports: per-row records, aggregates and serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

COLUMNS = ("trial_id", "m", "r", "knots", "fn", "lhs", "rhs", "ratio")
QUANTILES = (0.5, 0.9, 0.99)


@dataclass
class Row:
    trial_id: int
    m: int
    r: int
    knots: str
    fn: str
    lhs: float
    rhs: float
    ratio: float
    failed: bool = False
    extra: dict = field(default_factory=dict)


def score(lhs: float, rhs: float, zero_tol: float):
    """``(ratio, failed)``; a vanishing lhs scores 0, a vanishing rhs alone fails."""
    if lhs <= zero_tol:
        return 0.0, False
    if rhs <= 0.0:
        return math.inf, True
    return lhs / rhs, False


@dataclass
class VerificationReport:
    check: str
    key: str
    config: dict
    rows: list = field(default_factory=list)
    baseline: Optional[float] = None
    slack: float = 1.05
    fixed_bound: Optional[float] = None
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    elapsed: float = 0.0
    label: Optional[str] = None

    @property
    def baseline_name(self) -> str:
        return self.label or self.check

    @property
    def name(self) -> str:
        return f"{self.baseline_name}[{self.key}]"

    @property
    def ratios(self) -> np.ndarray:
        return np.array([row.ratio for row in self.rows], dtype=float)

    @property
    def max_ratio(self) -> float:
        r = self.ratios
        return float(np.max(r)) if r.size else 0.0

    @property
    def argmax(self) -> Optional[int]:
        r = self.ratios
        return int(self.rows[int(np.argmax(r))].trial_id) if r.size else None

    @property
    def failures(self) -> list:
        return [row for row in self.rows if row.failed]

    @property
    def limit(self) -> Optional[float]:
        if self.fixed_bound is not None:
            return self.fixed_bound
        if self.baseline is None:
            return None
        return self.baseline * self.slack

    @property
    def passed(self) -> bool:
        if self.failures or not math.isfinite(self.max_ratio):
            return False
        if not self.rows:
            return True
        lim = self.limit
        return lim is not None and self.max_ratio <= lim

    def quantiles(self) -> dict:
        r = self.ratios
        if not r.size:
            return {}
        return {f"q{int(q * 100)}": float(np.quantile(r, q)) for q in QUANTILES}

    def summary(self, deterministic: bool = False) -> dict:
        out = {
            "check": self.baseline_name,
            "key": self.key,
            "rows": len(self.rows),
            "failures": len(self.failures),
            "max_ratio": self.max_ratio,
            "argmax_trial": self.argmax,
            "quantiles": self.quantiles(),
            "baseline": self.baseline,
            "limit": self.limit,
            "passed": self.passed,
            "config": self.config,
            "notes": list(self.notes),
        }
        out.update(self.extra)
        if not deterministic:
            out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
            out["elapsed_s"] = round(self.elapsed, 3)
        return out

    def csv_text(self, fmt: str = "%.17g") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows:
            w.writerow([row.trial_id, row.m, row.r, row.knots, row.fn,
                        fmt % row.lhs, fmt % row.rhs, fmt % row.ratio])
        return buf.getvalue()

    def write(self, out_dir, deterministic: bool = False) -> tuple:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{self.baseline_name}_{self.key.replace(',', '_')}"
        csv_path = out / f"{stem}.csv"
        json_path = out / f"{stem}.json"
        csv_path.write_text(self.csv_text())
        json_path.write_text(json.dumps(self.summary(deterministic), indent=2, sort_keys=True,
                                        default=_jsonable) + "\n")
        return csv_path, json_path


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not serializable: {type(v)}")
