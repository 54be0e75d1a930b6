import math

import numpy as np
import pytest

from divlab import KnotSet, QuadratureSpec, lambda_pqr, lambda_r, phi_lookup
from divlab.corpus import PowerModulus
from divlab.errors import DomainError
from divlab.verify.sampling import sample_knots, sample_modulus, trial_rng

BOOLE = QuadratureSpec(method="adaptive-boole", rtol=1e-12)


def test_closed_forms():
    X = KnotSet.parse("0,0,1")
    assert abs(lambda_pqr(X, 1, (0, 2), phi_lookup("pow(1)")) - math.log(2)) <= 1e-9
    assert abs(lambda_pqr(X, 1, (0, 2), phi_lookup("pow(2)")) - 1.0) <= 1e-9
    res = lambda_r(X, 1, phi_lookup("pow(1)"))
    assert tuple(res.argmax_pair) == (0, 2)


def test_quadrature_path_agrees_with_exact():
    X = KnotSet.parse("0,0,1")
    assert lambda_pqr(X, 1, (0, 2), phi_lookup("pow(1)"), quad=BOOLE) == pytest.approx(
        math.log(2), abs=1e-10)


def test_zero_modulus():
    X = KnotSet.parse("0,0.3,0.4,1")
    assert lambda_r(X, 1, phi_lookup("zero")).value == 0.0


def test_four_equispaced_knots_by_hand():
    # phi(u) = u; limits and denominators worked out with the reflected end knots
    X = KnotSet.parse("0,1,2,3")
    want = {(0, 2): math.log(1.5) / 3, (0, 3): 1 / 3 - 1 / 6, (1, 3): math.log(1.5) / 3}
    phi = phi_lookup("pow(1)")
    for pq, v in want.items():
        assert lambda_pqr(X, 1, pq, phi) == pytest.approx(v, rel=1e-12)
        assert lambda_pqr(X, 1, pq, phi, quad=BOOLE) == pytest.approx(v, rel=1e-10)
    res = lambda_r(X, 1, phi)
    assert tuple(res.argmax_pair) == (0, 3)
    assert res.value == pytest.approx(1 / 6, rel=1e-12)


def test_pair_outside_q_is_rejected():
    X = KnotSet.parse("0,0,1")
    with pytest.raises(DomainError):
        lambda_pqr(X, 1, (0, 1), phi_lookup("pow(1)"))
    with pytest.raises(DomainError, match="empty"):
        lambda_r(KnotSet.parse("0,1"), 1, phi_lookup("pow(1)"))


def _draw(i):
    rng = trial_rng(404, i)
    m = int(rng.integers(2, 8))
    r = int(rng.integers(0, min(2, m - 1) + 1))
    X = sample_knots(rng, m + 1, r, 1e-3, "random")
    phi = sample_modulus(rng, None, 2.0)
    return rng, X, r, phi


@pytest.mark.parametrize("i", range(200))
def test_homogeneity_and_reflection(i):
    rng, X, r, phi = _draw(i)
    c = float(rng.uniform(0.1, 10.0))
    base = lambda_r(X, r, phi).value
    assert abs(lambda_r(X, r, phi.scaled(c)).value - c * base) <= 1e-8 * max(1.0, abs(c * base))
    assert abs(lambda_r(X.reflected(), r, phi).value - base) <= 1e-8 * max(1.0, abs(base))


@pytest.mark.parametrize("i", range(20))
def test_monotone_in_phi(i):
    _, X, r, _ = _draw(i)
    small = PowerModulus(1.0, cap=0.2, declared_domain=4.0)
    big = PowerModulus(1.0, declared_domain=4.0)
    assert lambda_r(X, r, small).value <= lambda_r(X, r, big).value * (1 + 1e-12)


def test_log_space_denominator_for_long_sets():
    X = KnotSet(tuple(np.linspace(0, 1, 12)), (1,) * 12)
    v = lambda_r(X, 1, phi_lookup("pow(1)")).value
    assert np.isfinite(v) and v > 0
