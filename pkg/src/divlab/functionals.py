"""The functionals Lambda_{p,q,r} and Lambda_r."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import ModulusFunction
from .errors import DomainError
from .knots import IndexPair, KnotSet, d_pq, q_set
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate

__all__ = ["LambdaResult", "QuadratureSpec", "lambda_pqr", "lambda_r", "lambda_terms"]


@dataclass(frozen=True)
class LambdaResult:
    value: float
    argmax_pair: IndexPair
    quadrature_error_bound: float


def _check_pair(X: KnotSet, r: int, pair) -> IndexPair:
    p, q = int(pair[0]), int(pair[1])
    if not (0 <= p and q <= X.m and q - p >= r + 1):
        raise DomainError(f"pair ({p},{q}) not in Q_{{{X.m},{r}}}")
    return IndexPair(p, q)


def _denominator(X: KnotSet, p: int, q: int) -> float:
    xs = X.expanded
    left = xs[q] - xs[:p]
    right = xs[q + 1:] - xs[p]
    if X.m > 8:
        logs = np.concatenate([np.log(left), np.log(right)])
        return float(np.exp(logs.sum()))
    return float(np.prod(left) * np.prod(right))


def lambda_terms(X: KnotSet, r: int, pairs=None):
    """Exponents, integration limits and denominators for each pair."""
    pairs = q_set(X.m, r) if pairs is None else [_check_pair(X, r, pq) for pq in pairs]
    xs = X.expanded
    e = np.array([p + r - q - 1 for p, q in pairs], dtype=float)
    lo = np.array([xs[q] - xs[p] for p, q in pairs])
    hi = np.array([d_pq(X, pq, r) for pq in pairs])
    den = np.array([_denominator(X, p, q) for p, q in pairs])
    return pairs, e, lo, hi, den


def _use_exact(phi: ModulusFunction, quad: QuadratureSpec) -> bool:
    return phi.exact_integrals and quad.method == "auto"


def _pair_integral(phi, e, lo, hi, quad):
    if not hi > lo:
        return 0.0, 0.0
    if _use_exact(phi, quad):
        return float(phi.power_integrals(e, lo, hi)), 0.0
    return integrate(lambda u: u ** e * phi.eval(u), lo, hi, quad)


def lambda_pqr(X: KnotSet, r: int, pair, phi: ModulusFunction,
               quad: QuadratureSpec = DEFAULT_QUAD, with_error: bool = False):
    """``int_{x_q-x_p}^{d(p,q)} u**(p+r-q-1) phi(u) du`` over the knot-distance products."""
    p, q = _check_pair(X, r, pair)
    _, e, lo, hi, den = lambda_terms(X, r, [(p, q)])
    val, err = _pair_integral(phi, e[0], lo[0], hi[0], quad)
    if with_error:
        return val / den[0], err / den[0]
    return val / den[0]


def lambda_r(X: KnotSet, r: int, phi: ModulusFunction,
             quad: QuadratureSpec = DEFAULT_QUAD) -> LambdaResult:
    """Maximum of ``lambda_pqr`` over ``Q_{m,r}``; ties go to the first pair."""
    if X.m <= r:
        raise DomainError(f"Lambda_r undefined: Q_{{{X.m},{r}}} empty")
    pairs, e, lo, hi, den = lambda_terms(X, r)
    if _use_exact(phi, quad):
        ints = np.where(hi > lo, phi.power_integrals(e, lo, np.maximum(hi, lo)), 0.0)
        errs = np.zeros_like(ints)
    else:
        res = [_pair_integral(phi, e[i], lo[i], hi[i], quad) for i in range(len(pairs))]
        ints = np.array([v for v, _ in res])
        errs = np.array([v for _, v in res])
    vals = ints / den
    i = int(np.argmax(vals))
    return LambdaResult(float(vals[i]), pairs[i], float(errs[i] / den[i]))
