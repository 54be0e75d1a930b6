"""Lagrange-Hermite divided differences and Newton-form Hermite interpolants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import kernels
from .errors import CapabilityError, ConditioningError, DomainError
from .knots import KnotSet


@dataclass(frozen=True)
class MonomialPoly:
    """Polynomial in the monomial basis, coefficients lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = [float(v) for v in self.coeffs] or [0.0]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if any(self.coeffs) else 0

    def deriv(self, j: int = 1) -> "MonomialPoly":
        c = list(self.coeffs)
        for _ in range(j):
            if len(c) == 1:
                return MonomialPoly((0.0,))
            c = [i * c[i] for i in range(1, len(c))]
        return MonomialPoly(tuple(c))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x) + self.coeffs[-1]
        for a in self.coeffs[-2::-1]:
            out = out * x + a
        return float(out) if out.ndim == 0 else out

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs)


@dataclass(frozen=True)
class NewtonForm:
    centers: np.ndarray
    coefficients: np.ndarray

    @property
    def degree_bound(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> float:
        return float(self.coefficients[-1])

    def to_monomial(self) -> MonomialPoly:
        # Horner in Newton form on coefficient vectors
        c = np.zeros(len(self.coefficients))
        c[0] = self.coefficients[-1]
        deg = 0
        for a, x0 in zip(self.coefficients[-2::-1], self.centers[::-1]):
            shifted = np.zeros_like(c)
            shifted[1:deg + 2] = c[:deg + 1]
            shifted[:deg + 1] -= x0 * c[:deg + 1]
            shifted[0] += a
            c = shifted
            deg += 1
        return MonomialPoly(tuple(c))

    def nested(self, x):
        """Value at ``x`` by nested multiplication, plus a running-error bound.

        The bound is a first-order estimate of the rounding error of the
        evaluation itself (not of the coefficients).
        """
        x = np.asarray(x, dtype=float)
        val = np.zeros_like(x) + self.coefficients[-1]
        mag = np.abs(val)
        for a, x0 in zip(self.coefficients[-2::-1], self.centers[::-1]):
            d = x - x0
            val = val * d + a
            mag = mag * np.abs(d) + np.abs(a)
        n = len(self.coefficients)
        return val, 2.0 * n * np.finfo(float).eps * mag


def _derivative_table(X: KnotSet, f):
    """``(hi, lo)`` tables of ``f^(l)(x_j)/l!`` indexed by expanded knot."""
    need = X.max_multiplicity - 1
    if need > f.max_derivative_order:
        raise CapabilityError(
            f"{f.identifier} provides derivatives up to order {f.max_derivative_order}; "
            f"knot multiplicity {X.max_multiplicity} needs order {need}")
    vals = np.asarray(X.distinct_values)
    hi = np.zeros((len(vals), need + 1))
    lo = np.zeros_like(hi)
    for l in range(need + 1):
        hi[:, l], lo[:, l] = f.taylor_data(vals, l)
    return hi[X.group_index], lo[X.group_index]


def divided_difference_table(X: KnotSet, f, backend=None) -> np.ndarray:
    """Coefficients ``[x_0..x_j; f]`` for ``j = 0..m``.

    The table is the recursion memoized over contiguous index ranges.
    """
    hi, lo = _derivative_table(X, f)
    return kernels.dd_table(X.expanded, hi, backend=backend, dvals_lo=lo)


def divided_difference(X: KnotSet, f, backend=None) -> float:
    """``[x_0, ..., x_m; f]``."""
    return float(divided_difference_table(X, f, backend=backend)[-1])


def divided_difference_bound(X: KnotSet, f) -> float:
    """First-order bound for the error caused by inexact data.

    Runs the recursion on ``|data|`` with sums in place of differences, which
    gives ``sum |c_i| |data_i|`` for the linear functional ``[X; .]``.
    """
    xs = X.expanded
    dvals = np.abs(_derivative_table(X, f)[0])
    n = len(xs)
    level = dvals[:, 0].copy()
    for lev in range(1, n):
        den = xs[lev:] - xs[:-lev]
        conf = den == 0.0
        new = (level[1:] + level[:-1]) / np.where(conf, 1.0, den)
        if conf.any():
            new = np.where(conf, dvals[: n - lev, lev], new)
        level = new
    eps = np.finfo(float).eps
    return float(4.0 * n * max(f.data_eps, eps * eps) * level[0])


def newton_hermite(X: KnotSet, f) -> NewtonForm:
    """Hermite interpolant of degree <= m in Newton form."""
    coef = divided_difference_table(X, f)
    centers = np.array(X.expanded[:-1])
    return NewtonForm(centers=centers, coefficients=coef)


def eval_newton(P: NewtonForm, x, j: int = 0):
    """``j``-th derivative of ``P`` at ``x`` via the monomial expansion."""
    if j < 0:
        raise DomainError("derivative order must be nonnegative")
    return P.to_monomial().deriv(j)(x)


def solve_full_pivot(A, b, rtol=1e-14):
    """Gaussian elimination with complete pivoting.

    Raises ConditioningError when a pivot falls below ``rtol`` times the
    largest entry of ``A``.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = A.shape[0]
    perm = np.arange(n)
    scale = np.max(np.abs(A)) if A.size else 0.0
    if scale == 0.0:
        raise ConditioningError("zero matrix")
    for k in range(n):
        sub = np.abs(A[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i += k
        j += k
        if sub[i - k, j - k] <= rtol * scale:
            raise ConditioningError(f"pivot {sub[i - k, j - k]:.3e} below threshold at step {k}")
        if i != k:
            A[[k, i]] = A[[i, k]]
            b[[k, i]] = b[[i, k]]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
        piv = A[k, k]
        f = A[k + 1:, k] / piv
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        b[k + 1:] -= f * b[k]
    y = np.zeros(n)
    for k in range(n - 1, -1, -1):
        y[k] = (b[k] - A[k, k + 1:] @ y[k + 1:]) / A[k, k]
    out = np.empty(n)
    out[perm] = y
    return out


def confluent_vandermonde(X: KnotSet, center: float = 0.0, scale: float = 1.0):
    """Rows ``scale**l * d^l/dx^l t**i`` at each knot, ``t = (x - center)/scale``.

    Row ``j`` carries derivative order ``l_j - 1`` at ``x_j``.
    """
    n = X.size
    A = np.zeros((n, n))
    orders = np.zeros(n, dtype=int)
    for j in range(n):
        l = X.local_index(j) - 1
        orders[j] = l
        t = (X[j] - center) / scale
        for i in range(l, n):
            A[j, i] = math.perm(i, l) * t ** (i - l)
    return A, orders


def oracle_leading_coeff(X: KnotSet, f, precision: str = "mp", dps: int = 50) -> float:
    """Leading coefficient of the Hermite interpolant from a direct linear solve.

    The confluent Vandermonde system is assembled in the monomial basis of
    the variable ``t = (x - mid)/half`` mapping the knot hull onto [-1, 1].
    With ``precision="mp"`` it is solved in ``dps``-digit arithmetic from
    the same double-precision data; ``"double"`` uses complete pivoting in
    floating point and is only reliable for well separated knots.
    """
    vals = np.asarray(X.distinct_values)
    if X.m == 0:
        return float(f.eval(X[0], 0))
    span = X.span
    if span == 0.0:
        return float(f.eval(X[0], X.m)) / math.factorial(X.m)
    gaps = np.diff(vals)
    if gaps.size and gaps.min() < 1e-12 * span:
        raise ConditioningError(f"knot separation {gaps.min():.3e} below 1e-12 of span")
    orders = [X.local_index(j) - 1 for j in range(X.size)]
    # same evaluation path as the recursion, so both consume identical data
    thi, tlo = _derivative_table(X, f)
    pairs = [(thi[j, orders[j]], tlo[j, orders[j]]) for j in range(X.size)]
    data = [float(hi + lo) * math.factorial(orders[j]) for j, (hi, lo) in enumerate(pairs)]
    if precision == "double":
        center = 0.5 * (vals[0] + vals[-1])
        half = 0.5 * span
        A, _ = confluent_vandermonde(X, center, half)
        rhs = np.array([data[j] * half ** orders[j] for j in range(X.size)])
        coeffs = solve_full_pivot(A, rhs)
        return float(coeffs[-1] / half ** X.m)
    if precision != "mp":
        raise DomainError(f"unknown precision {precision!r}")
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(vals[0]), mpmath.mpf(vals[-1])
        center = (lo + hi) / 2
        half = (hi - lo) / 2
        n = X.size
        A = mpmath.matrix(n, n)
        b = mpmath.matrix(n, 1)
        for j in range(n):
            l = orders[j]
            t = (mpmath.mpf(X[j]) - center) / half
            for i in range(l, n):
                A[j, i] = math.perm(i, l) * t ** (i - l)
            hi, lo = pairs[j]
            b[j] = (mpmath.mpf(float(hi)) + mpmath.mpf(float(lo))) * math.factorial(l) * half ** l
        coeffs = mpmath.lu_solve(A, b)
        return float(coeffs[n - 1] / half ** X.m)


def simple_knot_error_identity(X: KnotSet, f, j_star: int):
    """Both sides of the simple-knot representation of ``[x_0..x_m; f]``.

    Returns ``(lhs, rhs)`` with ``lhs`` the divided difference and ``rhs`` the
    interpolation error at ``x_{j*}`` of the interpolant on the other knots,
    divided by ``prod_{j != j*} (x_{j*} - x_j)``.
    """
    if not 0 <= j_star <= X.m:
        raise DomainError(f"index {j_star} outside 0..{X.m}")
    if X.multiplicity_of(j_star) != 1:
        raise DomainError(f"x_{j_star} = {X[j_star]} is not a simple knot")
    lhs = divided_difference(X, f)
    if X.m == 0:
        return lhs, float(f.eval(X[0], 0))
    rest = X.without(j_star)
    xs = X[j_star]
    P = newton_hermite(rest, f)
    val, _ = P.nested(xs)
    others = np.delete(np.asarray(X.expanded), j_star)
    rhs = (float(f.eval(xs, 0)) - float(val)) / float(np.prod(xs - others))
    return lhs, rhs
