"""Symmetric finite differences and grid estimators of the modulus of smoothness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import (ModulusFunction, PiecewiseLinearModulus, StepModulus,
                     check_phi_membership)
from .errors import DomainError
from .knots import Interval
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate_panels

_EPS = np.finfo(float).eps


def _noise_floor(k: int, fmax: float) -> float:
    # rounding bound for a signed binomial sum of k+1 samples
    return 4.0 * (k + 1) * 2.0 ** k * _EPS * fmax


@dataclass(frozen=True)
class ModulusEstimate:
    k: int
    t: float
    interval: Interval
    value: float
    grid_x: int
    grid_u: int

    def __float__(self):
        return self.value


def symmetric_difference(f, k: int, u: float, x, interval: Interval):
    """``sum_i (-1)^i C(k,i) f(x + (k/2 - i) u)``, or 0 when the stencil leaves the interval."""
    if k < 1:
        raise DomainError("difference order must be >= 1")
    if not u > 0:
        raise DomainError("step must be positive")
    x = np.asarray(x, dtype=float)
    w = kernels.binomial_weights(k)
    acc = np.zeros_like(x)
    for i in range(k + 1):
        acc = acc + w[i] * np.asarray(f(x + (k / 2 - i) * u), dtype=float)
    inside = (x - k / 2 * u >= interval.a) & (x + k / 2 * u <= interval.b)
    out = np.where(inside, acc, 0.0)
    return float(out) if out.ndim == 0 else out


_BANDS = 14


def step_lattice(H: float, grid_u: int, bands: int = _BANDS) -> np.ndarray:
    """Fixed increasing steps in ``(0, H]``.

    Band ``l`` covers ``(H/2**(l+1), H/2**l]`` with ``grid_u // 2`` equal
    spacings, so relative resolution is about ``2/grid_u`` at every scale.
    """
    half = max(grid_u // 2, 1)
    j = np.arange(half + 1, 2 * half + 1)
    out = [H * j / (2 * half) / 2.0 ** l for l in range(bands)]
    return np.sort(np.concatenate(out))


def modulus(f, k: int, t: float, interval: Interval, grid_x: int = 2048, grid_u: int = 512,
            block: int = 32) -> ModulusEstimate:
    """Lower estimate of ``omega_k(f, t; interval)``.

    Steps are the points of :func:`step_lattice` with ``H = |interval|/k`` not
    exceeding ``t``; for each step the centres run over ``grid_x`` equispaced
    points of the admissible range, endpoints included.  The step set grows
    with ``t`` and the centres depend only on the step, so the estimate is
    nondecreasing in ``t``.  Below the finest band the steps fall back to
    ``j * t / grid_u``.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if k < 1:
        raise DomainError("difference order must be >= 1")
    L = interval.length
    H = L / k
    if H <= 0:
        return ModulusEstimate(k, t, interval, 0.0, grid_x, grid_u)
    lattice = step_lattice(H, grid_u)
    steps = lattice[lattice <= t]
    if steps.size == 0:
        steps = t * np.arange(1, grid_u + 1) / grid_u
    w = kernels.binomial_weights(k)
    s = np.linspace(0.0, 1.0, grid_x)
    best = 0.0
    fmax = 0.0
    for start in range(0, steps.size, block):
        u = steps[start:start + block, None]
        lo = interval.a + k / 2 * u
        centres = lo + (L - k * u) * s[None, :]
        acc = np.zeros_like(centres)
        for i in range(k + 1):
            vals = np.asarray(f(centres + (k / 2 - i) * u), dtype=float)
            fmax = max(fmax, float(np.max(np.abs(vals))))
            acc += w[i] * vals
        best = max(best, float(np.max(np.abs(acc))))
    if best <= _noise_floor(k, fmax):
        best = 0.0
    return ModulusEstimate(k, t, interval, best, grid_x, grid_u)


def _curve_steps(n: int, k: int, grid_u: int) -> np.ndarray:
    jmax = n // k
    if jmax < 1:
        return np.zeros(0, dtype=np.int64)
    if jmax <= grid_u:
        return np.arange(1, jmax + 1, dtype=np.int64)
    half = grid_u // 2
    dense = np.arange(1, half + 1)
    spread = np.round(np.geomspace(half, jmax, grid_u - half)).astype(np.int64)
    return np.unique(np.concatenate([dense, spread]))


class ModulusCurve(StepModulus):
    """Grid estimate of ``t -> omega_k(f, t; interval)`` as a step function.

    ``f`` is sampled at ``grid_x + 1`` equispaced points; steps are integer
    multiples of the spacing, so every stencil sits on sample points.  The
    value at ``t`` is the largest sampled difference with step ``<= t``.
    """

    def __init__(self, breaks, values, *, k, interval, spacing, sup_norm, identifier):
        super().__init__(breaks, values, identifier=identifier,
                         declared_domain=2.0 * max(interval.length, breaks[-1]))
        self.k = k
        self.interval = interval
        self.spacing = spacing
        self.sup_norm = sup_norm


def modulus_curve(f, k: int, interval: Interval, grid_x: int = 2048, grid_u: int = 512,
                  backend=None, identifier: str = "omega") -> ModulusCurve:
    if k < 1:
        raise DomainError("difference order must be >= 1")
    L = interval.length
    if not L > 0:
        raise DomainError("modulus curve needs an interval of positive length")
    if grid_x < k:
        raise DomainError(f"grid_x={grid_x} too small for order {k}")
    xs = np.linspace(interval.a, interval.b, grid_x + 1)
    samples = np.asarray(f(xs), dtype=float)
    fmax = float(np.max(np.abs(samples)))
    steps = _curve_steps(grid_x, k, grid_u)
    h = L / grid_x
    raw = kernels.difference_sweep(samples, k, steps, backend=backend)
    raw = np.where(raw <= _noise_floor(k, fmax), 0.0, raw)
    values = np.maximum.accumulate(raw)
    return ModulusCurve(steps * h, values, k=k, interval=interval, spacing=h,
                        sup_norm=fmax, identifier=identifier)


def _tail_integrals(omega: ModulusFunction, k: int, ts: np.ndarray, d: float,
                    quad: QuadratureSpec) -> np.ndarray:
    """``int_{t_i}^d u**(-k) omega(u) du`` for increasing ``ts < d``."""
    if omega.exact_integrals:
        return omega.power_integrals(-float(k), ts, np.full_like(ts, d))
    edges = np.append(ts, d)
    vals, _ = integrate_panels(lambda u: u ** (-float(k)) * omega.eval(u), edges, quad)
    return np.cumsum(vals[::-1])[::-1]


def phi_from_omega(omega: ModulusFunction, k: int, d: float,
                   quad: QuadratureSpec = DEFAULT_QUAD, nodes: int = 400) -> PiecewiseLinearModulus:
    """Largest convenient admissible ``phi`` dominated as follows.

    On ``(0, d/2]``, ``phi`` is the nondecreasing lower envelope of
    ``t**(k-1) * int_t^d u**(-k) omega(u) du``, capped by ``omega(d/2)``; on
    ``(d/2, d]`` it continues as ``min(phi(d/2) * (2t/d)**(k-1), omega(t))``
    and it is constant beyond ``d``.  Represented piecewise linearly.
    """
    if k < 2:
        raise DomainError("phi_from_omega needs k >= 2")
    if not d > 0:
        raise DomainError("d must be positive")
    check_phi_membership(omega, T=d)
    lower = np.unique(np.concatenate([
        np.geomspace(d * 1e-7, d / 2, nodes - nodes // 4),
        np.linspace(d / 2 / (nodes // 4), d / 2, nodes // 4),
    ]))
    psi = lower ** (k - 1) * _tail_integrals(omega, k, lower, d, quad)
    envelope = np.minimum.accumulate(psi[::-1])[::-1]
    env = np.minimum(envelope, omega.eval(d / 2))
    upper = np.linspace(d / 2, d, 65)[1:]
    top = np.minimum(env[-1] * (2 * upper / d) ** (k - 1), omega.eval(upper))
    ts = np.concatenate([lower, upper])
    vs = np.maximum.accumulate(np.maximum(np.concatenate([env, top]), 0.0))
    return PiecewiseLinearModulus(ts, vs, identifier=f"phi[{omega.identifier};k={k};d={d!r}]",
                                  declared_domain=2 * d)


def marchaud_rhs(F, ell: int, k: int, t: float, interval: Interval,
                 grid_x: int = 2048, grid_u: int = 512) -> float:
    """``t**ell * (int_t^L omega_k(F,u)/u**(ell+1) du + ||F|| / L**ell)``, no constant."""
    L = interval.length
    if not 1 <= ell < k:
        raise DomainError("need 1 <= ell < k")
    if not 0 < t <= L:
        raise DomainError(f"t={t} outside (0, {L}]")
    curve = modulus_curve(F, k, interval, grid_x=grid_x, grid_u=grid_u)
    integral = float(curve.power_integrals(-(ell + 1.0), t, L)) if t < L else 0.0
    return t ** ell * (integral + curve.sup_norm / L ** ell)
