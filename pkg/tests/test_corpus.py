import math

import mpmath
import numpy as np
import pytest

from divlab.corpus import PiecewiseLinearModulus, PowerModulus, corpus_lookup, phi_lookup
from divlab.errors import CapabilityError, CorpusLookupError, ValidationError

XS = np.array([-0.9, -0.3, 0.2, 0.45, 0.8])


def _mp_derivative(expr, x, j):
    with mpmath.workdps(40):
        return float(mpmath.diff(expr, mpmath.mpf(x), j))


@pytest.mark.parametrize("ident,expr,order", [
    ("exp", mpmath.exp, 5),
    ("sin", mpmath.sin, 5),
    ("cos", mpmath.cos, 5),
    ("affine(2,-1,exp)", lambda x: mpmath.exp(2 * x - 1), 4),
    ("scale(3,sin)", lambda x: 3 * mpmath.sin(x), 4),
    ("poly(1,-2,0,4)", lambda x: 1 - 2 * x + 4 * x ** 3, 4),
])
def test_derivatives_against_mpmath(ident, expr, order):
    f = corpus_lookup(ident)
    for j in range(order + 1):
        got = f.eval(XS, j)
        want = [_mp_derivative(expr, x, j) for x in XS]
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12), (ident, j)


def test_abs_power_derivatives_away_from_kink():
    f = corpus_lookup("abs(0.1,2.5)")
    assert f.max_derivative_order == 2
    for j in range(3):
        want = [_mp_derivative(lambda x: abs(x - 0.1) ** 2.5, x, j) for x in XS]
        assert np.allclose(f.eval(XS, j), want, rtol=1e-10)
    assert f.eval(0.1, 1) == 0.0


def test_truncated_power():
    f = corpus_lookup("tpow(0,3)")
    assert f.max_derivative_order == 2
    assert f.eval(-0.5) == 0.0
    assert f.eval(0.5) == pytest.approx(0.125)
    assert f.eval(0.5, 2) == pytest.approx(3.0)


def test_capability_error_beyond_order():
    with pytest.raises(CapabilityError):
        corpus_lookup("abs(0,1.5)").eval(0.2, 2)


@pytest.mark.parametrize("bad", ["nope", "x^-1", "abs(1)", "poly()", "affine(1,2)"])
def test_unknown_identifiers(bad):
    with pytest.raises(CorpusLookupError):
        corpus_lookup(bad)


def test_taylor_data_sums_to_scaled_derivative():
    f = corpus_lookup("exp")
    hi, lo = f.taylor_data(0.3, 4)
    assert float(hi + lo) == pytest.approx(math.exp(0.3) / 24, rel=1e-15)


def test_polynomial_taylor_data_is_compensated():
    f = corpus_lookup("x^9")
    x = 0.7643761370375782
    hi, lo = f.taylor_data(x, 3)
    with mpmath.workdps(60):
        want = mpmath.binomial(9, 3) * mpmath.mpf(x) ** 6
        err = abs(mpmath.mpf(float(hi)) + mpmath.mpf(float(lo)) - want) / want
    assert err < 1e-29


def test_phi_lookup_members():
    assert phi_lookup("pow(1)").eval(0.5) == 0.5
    assert phi_lookup("cappow(2,0.5)").eval(2.0) == 0.25
    assert phi_lookup("zero").eval(3.0) == 0.0
    assert phi_lookup("scaled(2,pow(1))").eval(0.25) == 0.5
    assert phi_lookup("pwlin(1,2,3,2)").eval(2.0) == pytest.approx(2.0)


def test_phi_membership_rejects_decreasing():
    with pytest.raises(ValidationError):
        phi_lookup("pwlin(1,2,2,1)")


@pytest.mark.parametrize("phi", [PowerModulus(1.7), PowerModulus(0.6, cap=0.3),
                                 PiecewiseLinearModulus([0.2, 0.5, 1.0], [0.1, 0.4, 0.45])])
@pytest.mark.parametrize("e", [-3.0, -1.0, 0.0, 1.5])
def test_power_integrals_match_mpmath(phi, e):
    a, b = 0.05, 0.9
    got = float(phi.power_integrals(e, a, b))
    with mpmath.workdps(30):
        pts = [a, 0.2, 0.3, 0.5, b]
        want = mpmath.quad(lambda u: u ** e * float(phi.eval(float(u))), pts)
    assert got == pytest.approx(float(want), rel=1e-8)
