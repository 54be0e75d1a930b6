"""Discrete minimax polynomial approximation by Remez exchange."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev

from .divdiff import MonomialPoly
from .errors import ConvergenceError, DomainError
from .knots import Interval


@dataclass(frozen=True)
class MinimaxResult:
    polynomial: MonomialPoly
    error: float
    equioscillation_points: tuple
    iterations: int
    levelled_error: float
    converged: bool = True


def chebyshev_grid(interval: Interval, n: int) -> np.ndarray:
    """``n + 1`` Chebyshev extreme points mapped to the interval, left to right."""
    j = np.arange(n + 1)
    s = np.sin(np.pi * (2 * j - n) / (2 * n)) if n > 0 else np.zeros(1)
    return interval.a + (interval.b - interval.a) * (s + 1.0) / 2.0


def _alternating_extrema(res):
    """Index of the largest |res| in every maximal run of constant sign."""
    sgn = np.sign(res)
    for i in range(1, len(sgn)):
        if sgn[i] == 0:
            sgn[i] = sgn[i - 1]
    idx = []
    start = 0
    for i in range(1, len(res) + 1):
        if i == len(res) or sgn[i] != sgn[start]:
            seg = np.arange(start, i)
            idx.append(int(seg[np.argmax(np.abs(res[seg]))]))
            start = i
    return idx


def remez_discrete(f, n: int, interval: Interval, grid: int = 4096,
                   rtol: float = 1e-9, max_iter: int = 100) -> MinimaxResult:
    """Best uniform approximation of degree ``<= n`` on a Chebyshev grid.

    ``grid`` is the number of grid intervals; the grid has ``grid + 1`` points
    and contains the interval midpoint when ``grid`` is even.
    """
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if grid < n + 2:
        raise DomainError(f"grid={grid} too small for degree {n}")
    if not interval.length > 0:
        raise DomainError("interval must have positive length")
    x = chebyshev_grid(interval, grid)
    fx = np.asarray(f(x), dtype=float)
    s = (2 * x - (interval.a + interval.b)) / interval.length
    V = np.polynomial.chebyshev.chebvander(s, n)
    ref_s = np.cos(np.pi * np.arange(n + 2)[::-1] / (n + 1))
    ref = np.unique(np.searchsorted(s, ref_s).clip(0, grid))
    if len(ref) < n + 2:
        ref = np.unique(np.round(np.linspace(0, grid, n + 2)).astype(int))
    signs = (-1.0) ** np.arange(n + 2)
    scale = max(1.0, float(np.max(np.abs(fx))))
    history = []
    coef = np.zeros(n + 1)
    E = 0.0
    for it in range(1, max_iter + 1):
        A = np.column_stack([V[ref], signs])
        sol = np.linalg.solve(A, fx[ref])
        coef, E = sol[:-1], sol[-1]
        res = fx - V @ coef
        err = float(np.max(np.abs(res)))
        history.append((err, abs(E)))
        if err <= 1e-14 * scale or err - abs(E) <= rtol * err:
            return _result(coef, interval, err, x[ref], it, abs(E), True)
        peaks = _alternating_extrema(res)
        top = int(np.argmax(np.abs(res)))
        if len(peaks) < n + 2:
            raise ConvergenceError("residual has fewer alternations than degree + 2",
                                   {"iterations": it, "history": history})
        while len(peaks) > n + 2:
            if peaks[0] == top or (peaks[-1] != top and abs(res[peaks[-1]]) < abs(res[peaks[0]])):
                peaks.pop()
            else:
                peaks.pop(0)
        new_ref = np.array(peaks)
        if np.array_equal(new_ref, ref):
            raise ConvergenceError("exchange stagnated on an unchanged reference",
                                   {"iterations": it, "history": history})
        ref = new_ref
    return _result(coef, interval, history[-1][0], x[ref], max_iter, abs(E), False)


def _result(coef, interval, err, ref_x, it, levelled, converged):
    cheb = Chebyshev(coef, domain=[interval.a, interval.b])
    mono = cheb.convert(kind=np.polynomial.Polynomial)
    return MinimaxResult(MonomialPoly(tuple(mono.coef)), err, tuple(float(v) for v in ref_x),
                         it, float(levelled), converged)
