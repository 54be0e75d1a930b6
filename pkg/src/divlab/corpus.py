"""Test functions with exact derivatives and admissible modulus functions.

Both registries are closed: identifiers are parsed into a fixed set of
families, never evaluated as expressions.

Function identifiers::

    x^3                 monomial
    poly(1,0,-2)        polynomial, lowest degree first
    exp  sin  cos
    abs(c,alpha)        |x - c|**alpha
    tpow(c,s)           (x - c)_+**s
    affine(a,b,F)       F(a*x + b)
    scale(c,F)          c * F(x)

Modulus identifiers::

    pow(beta)           t**beta
    cappow(beta,T0)     min(t, T0)**beta
    pwlin(t1,v1,...)    piecewise linear through (0,0), (t1,v1), ...
    zero
    scaled(c,PHI)       c * PHI(t)
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .kernels import _quick_two_sum, _two_prod, _two_sum

from .errors import CapabilityError, CorpusLookupError, DomainError, ValidationError
from .knots import Interval

ANALYTIC_ORDER = 1000
_REAL_LINE = Interval(-math.inf, math.inf)


def _split_args(text: str) -> list:
    """Split a comma-separated argument list at nesting depth zero."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise CorpusLookupError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise CorpusLookupError(f"unbalanced parentheses in {text!r}")
    out.append("".join(cur).strip())
    return out


def _parse_call(identifier: str):
    ident = identifier.strip()
    if "(" not in ident:
        return ident, []
    if not ident.endswith(")"):
        raise CorpusLookupError(f"malformed identifier {identifier!r}")
    name, rest = ident.split("(", 1)
    return name.strip(), _split_args(rest[:-1])


def _num(text: str, identifier: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CorpusLookupError(f"bad numeric argument {text!r} in {identifier!r}") from None


def _falling(a: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= a - i
    return out


# ==========================================================================
# smooth functions

class SmoothFunction:
    """A corpus member: ``eval(x, j)`` returns the j-th derivative at ``x``."""

    identifier: str
    max_derivative_order: int
    domain: Interval = _REAL_LINE

    def eval(self, x, j: int = 0):
        if j < 0:
            raise DomainError("derivative order must be nonnegative")
        if j > self.max_derivative_order:
            raise CapabilityError(
                f"{self.identifier} exposes derivatives up to order "
                f"{self.max_derivative_order}, requested {j}")
        arr = np.asarray(x, dtype=float)
        out = self._eval(arr, j)
        return float(out) if out.ndim == 0 else out

    def __call__(self, x):
        return self.eval(x, 0)

    # relative accuracy of the values returned by taylor_data
    data_eps = float(np.finfo(float).eps)

    def taylor_data(self, x, l: int):
        """``f^(l)(x) / l!`` as a pair ``(hi, lo)`` with ``hi + lo`` the value."""
        v = np.asarray(self.eval(x, l), dtype=float)
        fact = float(math.factorial(l))
        q = v / fact
        p, e = _two_prod(q, fact)
        return q, (v - p - e) / fact

    def view(self, j: int = 0) -> Callable:
        """Vectorized callable ``x -> f^(j)(x)``."""
        if j > self.max_derivative_order:
            raise CapabilityError(
                f"{self.identifier} has no derivative of order {j}")
        return lambda x: self.eval(x, j)

    def closed_form_modulus(self, k: int, t: float, interval: Interval, deriv: int = 0):
        """Exact ``omega_k(f^(deriv), t; interval)`` when known, else None."""
        return None

    def _eval(self, x, j):
        raise NotImplementedError

    def __repr__(self):
        return f"<SmoothFunction {self.identifier}>"


class Polynomial(SmoothFunction):
    def __init__(self, coeffs, identifier=None):
        c = [float(v) for v in coeffs]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        self.coeffs = np.array(c)
        self.identifier = identifier or "poly(" + ",".join(repr(v) for v in c) + ")"
        self.max_derivative_order = ANALYTIC_ORDER

    @property
    def degree(self) -> int:
        return 0 if np.all(self.coeffs == 0) else len(self.coeffs) - 1

    def _deriv_coeffs(self, j):
        c = self.coeffs
        if j >= len(c):
            return np.zeros(1)
        return np.array([_falling(i, j) * c[i] for i in range(j, len(c))])

    def _eval(self, x, j):
        c = self._deriv_coeffs(j)
        out = np.zeros_like(x, dtype=float) + c[-1]
        for a in c[-2::-1]:
            out = out * x + a
        return out

    data_eps = float(np.finfo(float).eps) ** 2 * 8

    def taylor_data(self, x, l):
        # compensated Horner on the exact Taylor coefficients C(i,l) c_i
        x = np.asarray(x, dtype=float)
        c = self.coeffs
        if l >= len(c):
            z = np.zeros_like(x)
            return z, z.copy()
        ah, al = _two_prod(np.array([float(math.comb(i, l)) for i in range(l, len(c))]), c[l:])
        hi = np.zeros_like(x) + ah[-1]
        lo = np.zeros_like(x) + al[-1]
        for bh, bl in zip(ah[-2::-1], al[-2::-1]):
            ph, pl = _two_prod(hi, x)
            pl = pl + lo * x
            s, e = _two_sum(ph, bh)
            e = e + pl + bl
            hi, lo = _quick_two_sum(s, e)
        return hi, lo

    def closed_form_modulus(self, k, t, interval, deriv=0):
        c = self._deriv_coeffs(deriv)
        nz = np.nonzero(c)[0]
        n = int(nz[-1]) if nz.size else -1
        if k > n:
            return 0.0
        if k == n:
            u = min(t, interval.length / k)
            return abs(c[n]) * math.factorial(k) * u ** k
        return None


class Exp(SmoothFunction):
    identifier = "exp"
    max_derivative_order = ANALYTIC_ORDER

    def _eval(self, x, j):
        return np.exp(x)

    def closed_form_modulus(self, k, t, interval, deriv=0):
        u = min(t, interval.length / k)
        return math.exp(interval.b) * (-math.expm1(-u)) ** k


class Sin(SmoothFunction):
    identifier = "sin"
    max_derivative_order = ANALYTIC_ORDER
    _phase = 0

    def _eval(self, x, j):
        r = (j + self._phase) % 4
        if r == 0:
            return np.sin(x)
        if r == 1:
            return np.cos(x)
        if r == 2:
            return -np.sin(x)
        return -np.cos(x)


class Cos(Sin):
    identifier = "cos"
    _phase = 1


class AbsPower(SmoothFunction):
    """``|x - c|**alpha`` with derivatives kept continuous."""

    def __init__(self, c, alpha):
        if not alpha > 0:
            raise CorpusLookupError(f"abs power needs alpha > 0, got {alpha}")
        self.c, self.alpha = float(c), float(alpha)
        self.identifier = f"abs({self.c!r},{self.alpha!r})"
        self.max_derivative_order = int(math.ceil(self.alpha)) - 1

    def _eval(self, x, j):
        d = x - self.c
        mag = _falling(self.alpha, j) * np.abs(d) ** (self.alpha - j)
        return mag * np.sign(d) ** j if j else mag

    def closed_form_modulus(self, k, t, interval, deriv=0):
        if self.alpha == 1.0 and k == 1 and deriv == 0:
            a, b, c = interval.a, interval.b, self.c
            reach = max(b - c, c - a) if a <= c <= b else interval.length
            return min(t, interval.length, reach)
        return None


class TruncatedPower(SmoothFunction):
    """``(x - c)_+**s``."""

    def __init__(self, c, s):
        if not s > 0:
            raise CorpusLookupError(f"truncated power needs s > 0, got {s}")
        self.c, self.s = float(c), float(s)
        s_txt = repr(int(self.s)) if self.s.is_integer() else repr(self.s)
        self.identifier = f"tpow({self.c!r},{s_txt})"
        self.max_derivative_order = int(math.ceil(self.s)) - 1

    def _eval(self, x, j):
        d = np.maximum(x - self.c, 0.0)
        return _falling(self.s, j) * d ** (self.s - j)


class Affine(SmoothFunction):
    """``inner(a*x + b)``."""

    def __init__(self, a, b, inner: SmoothFunction):
        if a == 0:
            raise CorpusLookupError("affine composite needs a != 0")
        self.a, self.b, self.inner = float(a), float(b), inner
        self.identifier = f"affine({self.a!r},{self.b!r},{inner.identifier})"
        self.max_derivative_order = inner.max_derivative_order

    def _eval(self, x, j):
        return self.a ** j * self.inner._eval(self.a * x + self.b, j)


class Scaled(SmoothFunction):
    def __init__(self, c, inner: SmoothFunction):
        self.c, self.inner = float(c), inner
        self.identifier = f"scale({self.c!r},{inner.identifier})"
        self.max_derivative_order = inner.max_derivative_order

    def _eval(self, x, j):
        return self.c * self.inner._eval(x, j)

    def closed_form_modulus(self, k, t, interval, deriv=0):
        inner = self.inner.closed_form_modulus(k, t, interval, deriv)
        return None if inner is None else abs(self.c) * inner


FUNCTION_FAMILIES = {
    "x^s": "monomial x**s, s a nonnegative integer",
    "poly(c0,c1,...)": "polynomial with coefficients lowest degree first",
    "exp": "exponential",
    "sin": "sine",
    "cos": "cosine",
    "abs(c,alpha)": "|x - c|**alpha, derivatives to ceil(alpha)-1",
    "tpow(c,s)": "truncated power (x - c)_+**s, derivatives to ceil(s)-1",
    "affine(a,b,F)": "F(a*x + b)",
    "scale(c,F)": "c * F(x)",
}


def corpus_lookup(identifier: str) -> SmoothFunction:
    """Parse a function identifier into a :class:`SmoothFunction`."""
    ident = identifier.strip().replace(" ", "")
    if ident.startswith("x^"):
        try:
            s = int(ident[2:])
        except ValueError:
            raise CorpusLookupError(f"bad monomial exponent in {identifier!r}") from None
        if s < 0:
            raise CorpusLookupError("monomial exponent must be nonnegative")
        return Polynomial([0.0] * s + [1.0], identifier=f"x^{s}")
    if ident == "x":
        return Polynomial([0.0, 1.0], identifier="x^1")
    name, args = _parse_call(ident)
    if name == "exp" and not args:
        return Exp()
    if name == "sin" and not args:
        return Sin()
    if name == "cos" and not args:
        return Cos()
    if name == "poly" and args:
        return Polynomial([_num(a, identifier) for a in args])
    if name == "abs" and len(args) == 2:
        return AbsPower(_num(args[0], identifier), _num(args[1], identifier))
    if name == "tpow" and len(args) == 2:
        return TruncatedPower(_num(args[0], identifier), _num(args[1], identifier))
    if name == "affine" and len(args) == 3:
        return Affine(_num(args[0], identifier), _num(args[1], identifier),
                      corpus_lookup(args[2]))
    if name == "scale" and len(args) == 2:
        return Scaled(_num(args[0], identifier), corpus_lookup(args[1]))
    raise CorpusLookupError(f"unknown function identifier {identifier!r}")


# ==========================================================================
# modulus functions

def power_integral(e, a, b):
    """Elementwise ``int_a^b u**e du`` for ``0 < a <= b`` (float ``e``)."""
    e = np.asarray(e, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log1p((b - a) / a)
        e1 = e + 1.0
        is_log = e1 == 0.0
        safe = np.where(is_log, 1.0, e1)
        general = a ** e1 * np.expm1(e1 * ratio) / safe
        out = np.where(is_log, ratio, general)
    return np.where(b > a, out, 0.0)


class ModulusFunction:
    """A nondecreasing ``phi`` on ``[0, inf)`` with ``phi(0) = 0``.

    ``declared_domain`` is the right end ``T`` of the interval ``[0, T]`` on
    which membership is checked.
    """

    identifier: str = "phi"
    declared_domain: float = 4.0
    exact_integrals = False

    def eval(self, t):
        arr = np.asarray(t, dtype=float)
        out = self._eval(arr)
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self.eval(t)

    def _eval(self, t):
        raise NotImplementedError

    def scaled(self, c: float) -> "ModulusFunction":
        return ScaledModulus(c, self)

    def power_integrals(self, e, a, b):
        """``int_a^b u**e phi(u) du`` elementwise; only when ``exact_integrals``."""
        raise NotImplementedError

    def __repr__(self):
        return f"<ModulusFunction {self.identifier}>"


class ZeroModulus(ModulusFunction):
    identifier = "zero"
    exact_integrals = True

    def _eval(self, t):
        return np.zeros_like(t, dtype=float)

    def power_integrals(self, e, a, b):
        return np.zeros(np.broadcast(e, a, b).shape)


class PowerModulus(ModulusFunction):
    """``min(t, cap)**beta`` (no cap when ``cap`` is None)."""

    def __init__(self, beta, cap=None, declared_domain=4.0):
        if not beta > 0:
            raise ValidationError(f"power modulus needs beta > 0, got {beta}")
        if cap is not None and not cap > 0:
            raise ValidationError(f"cap must be positive, got {cap}")
        self.beta = float(beta)
        self.cap = None if cap is None else float(cap)
        self.declared_domain = float(declared_domain)
        if self.cap is None:
            self.identifier = f"pow({self.beta!r})"
        else:
            self.identifier = f"cappow({self.beta!r},{self.cap!r})"

    def _eval(self, t):
        tt = np.maximum(t, 0.0)
        if self.cap is not None:
            tt = np.minimum(tt, self.cap)
        return tt ** self.beta

    exact_integrals = True

    def power_integrals(self, e, a, b):
        e = np.asarray(e, dtype=float)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.cap is None:
            return power_integral(e + self.beta, a, b)
        mid = np.clip(self.cap, a, b)
        head = power_integral(e + self.beta, a, mid)
        tail = self.cap ** self.beta * power_integral(e, mid, b)
        return head + tail


class ScaledModulus(ModulusFunction):
    def __init__(self, c, inner: ModulusFunction):
        if not c >= 0:
            raise ValidationError("modulus scale factor must be nonnegative")
        self.c, self.inner = float(c), inner
        self.identifier = f"scaled({self.c!r},{inner.identifier})"
        self.declared_domain = inner.declared_domain
        self.exact_integrals = inner.exact_integrals

    def _eval(self, t):
        return self.c * self.inner._eval(t)

    def power_integrals(self, e, a, b):
        return self.c * self.inner.power_integrals(e, a, b)


class CallableModulus(ModulusFunction):
    """Wraps a vectorized callable supplied by the harness."""

    def __init__(self, fn, identifier="callable", declared_domain=4.0):
        self.fn = fn
        self.identifier = identifier
        self.declared_domain = float(declared_domain)

    def _eval(self, t):
        return np.asarray(self.fn(t), dtype=float)


class _Piecewise(ModulusFunction):
    exact_integrals = True

    def _pieces(self):
        """(left, right, alpha, beta): value ``alpha + beta*u`` on [left, right)."""
        raise NotImplementedError

    def power_integrals(self, e, a, b):
        left, right, alpha, beta = self._pieces()
        e = np.asarray(e, dtype=float)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        shape = np.broadcast(e, a, b).shape
        e, a, b = (np.broadcast_to(v, shape).reshape(-1, 1) for v in (e, a, b))
        lo = np.clip(left[None, :], a, b)
        hi = np.clip(right[None, :], a, b)
        total = alpha[None, :] * power_integral(e, lo, hi)
        if np.any(beta != 0.0):
            total = total + beta[None, :] * power_integral(e + 1.0, lo, hi)
        return total.sum(axis=1).reshape(shape)


class StepModulus(_Piecewise):
    """Right-continuous step function: ``values[i]`` on ``[breaks[i], breaks[i+1])``.

    Zero before ``breaks[0]`` and ``values[-1]`` after the last break.
    """

    def __init__(self, breaks, values, identifier="step", declared_domain=None):
        self.breaks = np.asarray(breaks, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.breaks.ndim != 1 or self.breaks.shape != self.values.shape or not self.breaks.size:
            raise ValidationError("step modulus needs aligned nonempty breaks/values")
        if np.any(np.diff(self.breaks) <= 0) or self.breaks[0] <= 0:
            raise ValidationError("step breaks must be positive and increasing")
        self.identifier = identifier
        self.declared_domain = float(declared_domain or 2.0 * self.breaks[-1])

    def _eval(self, t):
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        return np.where(idx >= 0, self.values[np.maximum(idx, 0)], 0.0)

    def _pieces(self):
        left = self.breaks
        right = np.append(self.breaks[1:], np.inf)
        return left, right, self.values, np.zeros_like(self.values)


class PiecewiseLinearModulus(_Piecewise):
    """Linear interpolation through ``(0, 0), (t_1, v_1), ...``; constant after."""

    def __init__(self, ts, vs, identifier=None, declared_domain=None):
        ts = np.asarray(ts, dtype=float)
        vs = np.asarray(vs, dtype=float)
        if ts.size == 0 or ts[0] != 0.0:
            ts = np.concatenate([[0.0], ts])
            vs = np.concatenate([[0.0], vs])
        if ts.shape != vs.shape or np.any(np.diff(ts) <= 0):
            raise ValidationError("piecewise-linear nodes must be strictly increasing")
        self.ts, self.vs = ts, vs
        self.identifier = identifier or (
            "pwlin(" + ",".join(f"{t!r},{v!r}" for t, v in zip(ts[1:], vs[1:])) + ")")
        self.declared_domain = float(declared_domain or 2.0 * ts[-1])

    def _eval(self, t):
        return np.interp(t, self.ts, self.vs)

    def _pieces(self):
        t0, t1 = self.ts[:-1], self.ts[1:]
        v0, v1 = self.vs[:-1], self.vs[1:]
        slope = (v1 - v0) / (t1 - t0)
        left = np.append(t0, self.ts[-1])
        right = np.append(t1, np.inf)
        alpha = np.append(v0 - slope * t0, self.vs[-1])
        beta = np.append(slope, 0.0)
        return left, right, alpha, beta


def check_phi_membership(phi: ModulusFunction, T: Optional[float] = None, n: int = 1024) -> None:
    """Raise ValidationError unless ``phi(0) = 0`` and ``phi`` is nondecreasing on ``[0, T]``."""
    T = phi.declared_domain if T is None else T
    grid = np.linspace(0.0, T, n)
    v = np.asarray(phi.eval(grid), dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{phi.identifier} is not finite on [0, {T}]")
    if v[0] != 0.0:
        raise ValidationError(f"{phi.identifier}(0) = {v[0]} != 0")
    if np.any(np.diff(v) < 0):
        i = int(np.argmax(np.diff(v) < 0))
        raise ValidationError(
            f"{phi.identifier} decreases between t={grid[i]:.6g} and t={grid[i + 1]:.6g}")


PHI_FAMILIES = {
    "pow(beta)": "t**beta",
    "cappow(beta,T0)": "min(t, T0)**beta",
    "pwlin(t1,v1,...)": "piecewise linear through (0,0),(t1,v1),...",
    "zero": "identically 0",
    "scaled(c,PHI)": "c * PHI(t)",
}


def phi_lookup(identifier: str) -> ModulusFunction:
    """Parse a modulus identifier; the result has passed the membership check."""
    ident = identifier.strip().replace(" ", "")
    name, args = _parse_call(ident)
    if name == "zero" and not args:
        phi = ZeroModulus()
    elif name == "pow" and len(args) == 1:
        phi = PowerModulus(_num(args[0], identifier))
    elif name == "cappow" and len(args) == 2:
        phi = PowerModulus(_num(args[0], identifier), cap=_num(args[1], identifier),
                           declared_domain=max(4.0, 2 * _num(args[1], identifier)))
    elif name == "pwlin" and args and len(args) % 2 == 0:
        nums = [_num(a, identifier) for a in args]
        phi = PiecewiseLinearModulus(nums[0::2], nums[1::2])
    elif name == "scaled" and len(args) == 2:
        phi = phi_lookup(args[1]).scaled(_num(args[0], identifier))
    else:
        raise CorpusLookupError(f"unknown modulus identifier {identifier!r}")
    check_phi_membership(phi)
    return phi
