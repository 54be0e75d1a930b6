import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divlab import (KnotSet, corpus_lookup, divided_difference, eval_newton, newton_hermite,
                    oracle_leading_coeff)
from divlab.divdiff import (divided_difference_bound, divided_difference_table,
                            simple_knot_error_identity, solve_full_pivot)
from divlab.errors import CapabilityError, ConditioningError, DomainError
from divlab.verify.sampling import sample_knots, trial_rng


def test_worked_hermite_instance(hermite_example):
    P = newton_hermite(hermite_example, corpus_lookup("x^4"))
    coeffs = P.to_monomial().coeffs
    assert np.allclose(coeffs, [-1.0, 0.0, 2.0], atol=1e-10)


def test_confluent_single_point_is_taylor_coefficient():
    X = KnotSet.parse("0.3,0.3,0.3,0.3")
    f = corpus_lookup("exp")
    assert divided_difference(X, f) == pytest.approx(math.exp(0.3) / 6, rel=1e-14)


def test_two_point_secant():
    f = corpus_lookup("sin")
    X = KnotSet.parse("0.1,0.6")
    assert divided_difference(X, f) == pytest.approx((math.sin(0.6) - math.sin(0.1)) / 0.5)


def test_cubic_monomial_on_three_knots():
    # {0,0,1} applied to x^3 gives the sum of the knots
    assert divided_difference(KnotSet.parse("0,0,1"), corpus_lookup("x^3")) == pytest.approx(1.0)


def test_table_prefixes():
    X = KnotSet.parse("0,0.5,0.5,1")
    f = corpus_lookup("exp")
    table = divided_difference_table(X, f)
    for j in range(X.size):
        assert table[j] == pytest.approx(divided_difference(X.subset(0, j + 1), f), rel=1e-13)


def test_multiplicity_beyond_data_is_rejected():
    with pytest.raises(CapabilityError):
        divided_difference(KnotSet.parse("0.5,0.5,0.5"), corpus_lookup("abs(0,1.5)"))


@pytest.mark.parametrize("seed", range(40))
def test_oracle_agreement(seed):
    rng = trial_rng(99, seed)
    m = int(rng.integers(0, 9))
    r = int(rng.integers(0, 4))
    X = sample_knots(rng, m + 1, r, 1e-3, "random")
    f = corpus_lookup(["exp", "sin", "cos", "affine(3,0,sin)"][seed % 4])
    v = divided_difference(X, f)
    assert abs(v - oracle_leading_coeff(X, f)) <= 1e-8 * max(1.0, abs(v))


def test_double_oracle_on_separated_knots():
    X = KnotSet.parse("0,0,0.5,1,1")
    f = corpus_lookup("exp")
    assert oracle_leading_coeff(X, f, precision="double") == pytest.approx(
        oracle_leading_coeff(X, f), rel=1e-10)


def test_oracle_refuses_coalesced_knots():
    X = KnotSet((0.0, 1e-14, 1.0), (1, 1, 1))
    with pytest.raises(ConditioningError):
        oracle_leading_coeff(X, corpus_lookup("exp"))


def test_unknown_precision():
    with pytest.raises(DomainError):
        oracle_leading_coeff(KnotSet.parse("0,1"), corpus_lookup("exp"), precision="quad")


@given(st.integers(0, 8), st.integers(0, 3), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_annihilates_lower_monomials(m, r, seed):
    rng = np.random.default_rng(seed)
    X = sample_knots(rng, m + 1, r, 1e-3, "random")
    for s in range(m):
        assert abs(divided_difference(X, corpus_lookup(f"x^{s}"))) <= 1e-9
    assert divided_difference(X, corpus_lookup(f"x^{m}")) == pytest.approx(1.0, rel=1e-10)


@given(st.integers(1, 7), st.integers(0, 2), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_hermite_conditions(m, r, seed):
    rng = np.random.default_rng(seed)
    X = sample_knots(rng, m + 1, r, 1e-2, "random")
    f = corpus_lookup("exp")
    P = newton_hermite(X, f)
    for j in range(X.size):
        l = X.local_index(j) - 1
        want = f.eval(X[j], l)
        assert abs(eval_newton(P, X[j], l) - want) <= 1e-8 * max(1.0, abs(want))


def test_bound_is_small_for_smooth_data():
    X = KnotSet.parse("0,0.2,0.2,0.7,1")
    assert 0.0 < divided_difference_bound(X, corpus_lookup("exp")) < 1e-12


def test_simple_knot_identity():
    X = KnotSet.parse("0,0,0.4,1")
    lhs, rhs = simple_knot_error_identity(X, corpus_lookup("exp"), 2)
    assert lhs == pytest.approx(rhs, rel=1e-9)
    with pytest.raises(DomainError):
        simple_knot_error_identity(X, corpus_lookup("exp"), 0)


def test_solve_full_pivot():
    A = np.array([[1e-20, 1.0], [1.0, 1.0]])
    assert np.allclose(solve_full_pivot(A, np.array([1.0, 2.0])), [1.0, 1.0])
    with pytest.raises(ConditioningError):
        solve_full_pivot(np.ones((2, 2)), np.ones(2))


def test_eval_newton_rejects_negative_order(hermite_example):
    P = newton_hermite(hermite_example, corpus_lookup("x^4"))
    with pytest.raises(DomainError):
        eval_newton(P, 0.0, -1)
