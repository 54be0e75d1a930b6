"""Hot numeric inner loops with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``DIVLAB_DISABLE_NUMBA`` is
unset (or ``0``).  Both paths perform the same floating-point operations in
the same order, so their outputs agree bitwise on IEEE hardware.
"""

from __future__ import annotations

import os

import numpy as np

_disabled = os.environ.get("DIVLAB_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _disabled:
        raise ImportError
    import numba
except ImportError:  # pragma: no cover - exercised via the env flag in CI
    numba = None

BACKEND = "numba" if numba is not None else "numpy"


def binomial_weights(k: int) -> np.ndarray:
    """Signed binomial weights ``(-1)**i * C(k, i)`` for ``i = 0..k``."""
    w = np.empty(k + 1)
    c = 1.0
    for i in range(k + 1):
        w[i] = c if i % 2 == 0 else -c
        c = c * (k - i) / (i + 1)
    return w


# --------------------------------------------------------------------------
# finite-difference sweep

def _difference_sweep_numpy(samples, weights, steps):
    n = samples.shape[0] - 1
    k = weights.shape[0] - 1
    out = np.zeros(steps.shape[0])
    for t in range(steps.shape[0]):
        j = steps[t]
        span = k * j
        if span > n:
            continue
        count = n - span + 1
        acc = np.zeros(count)
        for i in range(k + 1):
            off = (k - i) * j
            acc += weights[i] * samples[off:off + count]
        out[t] = np.max(np.abs(acc))
    return out


def _difference_sweep_py(samples, weights, steps):
    n = samples.shape[0] - 1
    k = weights.shape[0] - 1
    out = np.zeros(steps.shape[0])
    for t in range(steps.shape[0]):
        j = steps[t]
        span = k * j
        if span > n:
            continue
        best = 0.0
        for s in range(n - span + 1):
            acc = 0.0
            for i in range(k + 1):
                acc += weights[i] * samples[s + (k - i) * j]
            a = abs(acc)
            if a > best:
                best = a
        out[t] = best
    return out


# --------------------------------------------------------------------------
# divided-difference table
#
# Levels are carried as unevaluated sums hi + lo (double-double).  Knot
# differences are formed exactly with two_sum, so the only rounding left is
# of order eps**2 relative to the intermediate magnitudes.

_SPLIT = 134217729.0  # 2**27 + 1


def _jitable(fn):
    return register_jitable(fn) if numba is not None else fn


if numba is not None:
    from numba.extending import register_jitable


@_jitable
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@_jitable
def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@_jitable
def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@_jitable
def _dd_sub(ah, al, bh, bl):
    s, e = _two_sum(ah, -bh)
    e = e + (al - bl)
    return _quick_two_sum(s, e)


@_jitable
def _dd_div(ah, al, bh, bl):
    q1 = ah / bh
    p, e = _two_prod(q1, bh)
    e = e + q1 * bl
    s, t = _two_sum(ah, -p)
    t = t - e + al
    q2 = (s + t) / bh
    return _quick_two_sum(q1, q2)


def _dd_table_numpy(xs, dvals, dlo):
    n = xs.shape[0]
    maxmult = dvals.shape[1]
    coef = np.empty(n)
    hi = dvals[:, 0].copy()
    lo = dlo[:, 0].copy()
    coef[0] = hi[0] + lo[0]
    for lev in range(1, n):
        dh, dl = _two_sum(xs[lev:], -xs[:-lev])
        conf = dh == 0.0
        nh, nl = _dd_sub(hi[1:], lo[1:], hi[:-1], lo[:-1])
        qh, ql = _dd_div(nh, nl, np.where(conf, 1.0, dh), np.where(conf, 0.0, dl))
        if conf.any():
            if lev >= maxmult:
                raise ValueError("multiplicity exceeds supplied derivative table")
            qh = np.where(conf, dvals[: n - lev, lev], qh)
            ql = np.where(conf, dlo[: n - lev, lev], ql)
        hi, lo = qh, ql
        coef[lev] = hi[0] + lo[0]
    return coef


def _dd_table_py(xs, dvals, dlo):
    n = xs.shape[0]
    maxmult = dvals.shape[1]
    coef = np.empty(n)
    hi = dvals[:, 0].copy()
    lo = dlo[:, 0].copy()
    coef[0] = hi[0] + lo[0]
    for lev in range(1, n):
        for i in range(n - lev):
            dh, dl = _two_sum(xs[i + lev], -xs[i])
            if dh == 0.0:
                if lev >= maxmult:
                    raise ValueError("multiplicity exceeds supplied derivative table")
                hi[i] = dvals[i, lev]
                lo[i] = dlo[i, lev]
            else:
                nh, nl = _dd_sub(hi[i + 1], lo[i + 1], hi[i], lo[i])
                hi[i], lo[i] = _dd_div(nh, nl, dh, dl)
        coef[lev] = hi[0] + lo[0]
    return coef


if numba is not None:
    _difference_sweep_impl = numba.njit(cache=True)(_difference_sweep_py)
    _dd_table_impl = numba.njit(cache=True)(_dd_table_py)
else:
    _difference_sweep_impl = _difference_sweep_numpy
    _dd_table_impl = _dd_table_numpy


def difference_sweep(samples, k, steps, backend=None):
    """Largest ``|Delta^k|`` over all stencils on a uniform sample grid.

    Parameters
    ----------
    samples : ndarray
        Function values at ``n + 1`` equispaced points.
    k : int
        Difference order.
    steps : ndarray of int
        Step sizes in units of the grid spacing.  A stencil with step ``j``
        covers ``k*j`` grid intervals; steps whose stencil does not fit give 0.
    backend : {"numba", "numpy"}, optional
        Force one implementation; defaults to :data:`BACKEND`.

    Returns
    -------
    ndarray
        ``out[t] = max_s |sum_i (-1)^i C(k,i) samples[s + (k-i)*steps[t]]|``.
    """
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    steps = np.ascontiguousarray(steps, dtype=np.int64)
    w = binomial_weights(int(k))
    if backend is None:
        return _difference_sweep_impl(samples, w, steps)
    if backend == "numpy":
        return _difference_sweep_numpy(samples, w, steps)
    if backend == "numba":
        if numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _difference_sweep_impl(samples, w, steps)
    raise ValueError(f"unknown backend {backend!r}")


def dd_table(xs, dvals, backend=None, dvals_lo=None):
    """Newton coefficients ``[x_0..x_j; f]`` for ``j = 0..n-1``.

    ``xs`` is the nondecreasing expanded knot sequence and ``dvals[i, l]``
    holds ``f^(l)(xs[i]) / l!`` for every ``l`` below the multiplicity of
    ``xs[i]``; ``dvals_lo`` optionally carries the low parts of that data.
    Exactly equal neighbouring knots trigger the confluent entry.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    dvals = np.ascontiguousarray(dvals, dtype=np.float64)
    if dvals_lo is None:
        dlo = np.zeros_like(dvals)
    else:
        dlo = np.ascontiguousarray(dvals_lo, dtype=np.float64)
    if backend is None:
        return _dd_table_impl(xs, dvals, dlo)
    if backend == "numpy":
        return _dd_table_numpy(xs, dvals, dlo)
    if backend == "numba":
        if numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _dd_table_impl(xs, dvals, dlo)
    raise ValueError(f"unknown backend {backend!r}")
