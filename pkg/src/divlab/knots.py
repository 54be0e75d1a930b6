"""Knot multisets and the combinatorial quantities attached to them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError


class IndexPair(NamedTuple):
    p: int
    q: int


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a <= self.b:
            raise DomainError(f"interval endpoints out of order: [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @classmethod
    def parse(cls, text: str) -> "Interval":
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != 2:
            raise DomainError(f"interval must be 'a,b', got {text!r}")
        return cls(float(parts[0]), float(parts[1]))


@dataclass(frozen=True)
class KnotSet:
    """Sorted knot multiset.

    Stored as strictly increasing ``distinct_values`` with a positive
    multiplicity for each.  Two knots are equal only when they are the same
    distinct value; no floating-point tolerance is involved.
    """

    distinct_values: tuple
    multiplicities: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.distinct_values)
        mults = tuple(int(n) for n in self.multiplicities)
        if len(vals) != len(mults) or not vals:
            raise DomainError("distinct_values and multiplicities must be nonempty and aligned")
        if any(not np.isfinite(v) for v in vals):
            raise DomainError("knots must be finite")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("distinct_values must be strictly increasing")
        if any(n < 1 for n in mults):
            raise DomainError("multiplicities must be >= 1")
        object.__setattr__(self, "distinct_values", vals)
        object.__setattr__(self, "multiplicities", mults)

    # construction -------------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[float], snap: float = 0.0) -> "KnotSet":
        """Build from an unsorted list where repetition encodes multiplicity.

        With ``snap > 0`` consecutive sorted values closer than ``snap`` are
        merged into the first of them.
        """
        pts = sorted(float(x) for x in points)
        if not pts:
            raise DomainError("a knot set needs at least one point")
        vals, mults = [pts[0]], [1]
        for x in pts[1:]:
            if x == vals[-1] or (snap > 0 and x - vals[-1] < snap):
                mults[-1] += 1
            else:
                vals.append(x)
                mults.append(1)
        return cls(tuple(vals), tuple(mults))

    @classmethod
    def parse(cls, text: str, snap: float = 0.0) -> "KnotSet":
        try:
            pts = [float(p) for p in text.split(",") if p.strip()]
        except ValueError as exc:
            raise DomainError(f"cannot parse knot list {text!r}") from exc
        return cls.from_points(pts, snap=snap)

    def format(self) -> str:
        return ",".join(repr(float(x)) for x in self.expanded)

    # derived quantities -------------------------------------------------

    @cached_property
    def expanded(self) -> np.ndarray:
        out = np.repeat(np.asarray(self.distinct_values), self.multiplicities)
        out.setflags(write=False)
        return out

    @cached_property
    def group_index(self) -> np.ndarray:
        """Index into ``distinct_values`` for each expanded entry."""
        out = np.repeat(np.arange(len(self.distinct_values)), self.multiplicities)
        out.setflags(write=False)
        return out

    @property
    def m(self) -> int:
        """Highest index: the expanded sequence is ``x_0..x_m``."""
        return int(sum(self.multiplicities)) - 1

    @property
    def size(self) -> int:
        return self.m + 1

    @property
    def max_multiplicity(self) -> int:
        return max(self.multiplicities)

    @property
    def span(self) -> float:
        return self.distinct_values[-1] - self.distinct_values[0]

    @property
    def interval(self) -> Interval:
        return Interval(self.distinct_values[0], self.distinct_values[-1])

    def multiplicity_of(self, j: int) -> int:
        """``m_j``: multiplicity of the expanded entry ``x_j``."""
        return self.multiplicities[self.group_index[j]]

    def local_index(self, j: int) -> int:
        """``l_j``: count of entries equal to ``x_j`` with index ``<= j``."""
        g = self.group_index[j]
        first = int(sum(self.multiplicities[:g]))
        return j - first + 1

    def __len__(self):
        return self.size

    def __getitem__(self, j):
        return float(self.expanded[j])

    # derived knot sets --------------------------------------------------

    def subset(self, start: int, stop: int) -> "KnotSet":
        """Contiguous expanded slice ``x_start..x_{stop-1}``."""
        return KnotSet.from_points(self.expanded[start:stop])

    def without(self, j: int) -> "KnotSet":
        pts = list(self.expanded)
        del pts[j]
        return KnotSet.from_points(pts)

    def with_point(self, x: float) -> "KnotSet":
        return KnotSet.from_points(list(self.expanded) + [float(x)])

    def reflected(self) -> "KnotSet":
        """The set ``y_i = -x_{m-i}``."""
        return KnotSet(tuple(-v for v in reversed(self.distinct_values)),
                       tuple(reversed(self.multiplicities)))

    def affine(self, a: float, b: float) -> "KnotSet":
        """Image under ``x -> a*x + b`` (``a != 0``)."""
        if a == 0:
            raise DomainError("affine map must be nondegenerate")
        return KnotSet.from_points(a * self.expanded + b)

    def __repr__(self):
        return f"KnotSet({self.format()})"


def validate(X: KnotSet, r: int) -> bool:
    """True iff ``x_j < x_{j+r+1}`` for every admissible ``j``."""
    return X.max_multiplicity <= r + 1


def first_violation(X: KnotSet, r: int):
    """Smallest ``j`` with ``x_j == x_{j+r+1}``, or None."""
    xs = X.expanded
    for j in range(0, X.m - r):
        if not xs[j] < xs[j + r + 1]:
            return j
    return None


def q_set(m: int, r: int) -> list:
    """Pairs ``(p, q)`` with ``0 <= p`` and ``p + r + 1 <= q <= m``."""
    if m < 0 or r < 0:
        raise DomainError("m and r must be nonnegative")
    return [IndexPair(p, q) for p in range(0, m - r) for q in range(p + r + 1, m + 1)]


def knot_with_virtual(X: KnotSet, i: int) -> float:
    """``x_i`` for ``-1 <= i <= m + 1`` using the reflected virtual knots."""
    xs = X.expanded
    m = X.m
    if i == -1:
        return float(xs[0] - (xs[m] - xs[0]))
    if i == m + 1:
        return float(xs[m] + (xs[m] - xs[0]))
    if 0 <= i <= m:
        return float(xs[i])
    raise DomainError(f"knot index {i} outside -1..{m + 1}")


def d_pq(X: KnotSet, pair, r: int = 0) -> float:
    """``min(x_{q+1} - x_p, x_q - x_{p-1})`` with virtual end knots."""
    p, q = pair
    if not (0 <= p and q <= X.m and q - p >= r + 1):
        raise DomainError(f"pair {tuple(pair)} not in Q_{{{X.m},{r}}}")
    return min(knot_with_virtual(X, q + 1) - knot_with_virtual(X, p),
               knot_with_virtual(X, q) - knot_with_virtual(X, p - 1))


def sigma_order(points, x: float) -> np.ndarray:
    """Indices of ``points`` by nondecreasing distance from ``x``.

    Ties are broken by the smaller original index.
    """
    pts = points.expanded if isinstance(points, KnotSet) else np.asarray(points, dtype=float)
    return np.argsort(np.abs(x - pts), kind="stable")


def capital_d(points, x: float, r: int) -> float:
    """Product of the ``r + 1`` smallest distances ``|x - x_j|``.

    ``r = -1`` gives the empty product 1.
    """
    pts = points.expanded if isinstance(points, KnotSet) else np.asarray(points, dtype=float)
    n = len(pts)
    if not -1 <= r <= n - 1:
        raise DomainError(f"r={r} outside 0..{n - 1}")
    dist = np.sort(np.abs(x - pts), kind="stable")
    return float(np.prod(dist[: r + 1]))


def dist_to_set(x: float, Z: Sequence[float]) -> float:
    Z = np.asarray(Z, dtype=float)
    if Z.size == 0:
        raise DomainError("dist_to_set needs a nonempty set")
    return float(np.min(np.abs(x - Z)))


def separation(X: KnotSet, r: int) -> float:
    """Largest ``lam`` with ``x_{j+r+1} - x_j >= lam * span`` for all ``j``.

    Returns ``inf`` when there is no admissible ``j``.
    """
    xs = X.expanded
    n = X.size
    if n - r - 1 <= 0 or X.span == 0:
        return float("inf")
    gaps = xs[r + 1:] - xs[: n - r - 1]
    return float(np.min(gaps) / X.span)
