import numpy as np
import pytest

from divlab import Interval, corpus_lookup, marchaud_rhs, modulus, modulus_curve, phi_from_omega
from divlab.corpus import PowerModulus, check_phi_membership
from divlab.errors import DomainError
from divlab.smoothness import symmetric_difference

I = Interval(-1.0, 1.0)
PROBES = np.linspace(0.05, 1.0, 20)


@pytest.mark.parametrize("t", PROBES)
def test_second_modulus_of_square(t):
    est = modulus(corpus_lookup("x^2"), 2, t, I).value
    assert abs(est - 2 * t * t) <= 0.02 * 2 * t * t


@pytest.mark.parametrize("t", PROBES)
def test_first_modulus_of_abs(t):
    est = modulus(corpus_lookup("abs(0,1)"), 1, t, I).value
    assert abs(est - t) <= 0.02 * t


def test_monotone_in_t():
    vals = [modulus(corpus_lookup("sin"), 3, t, I, grid_x=256, grid_u=64).value for t in PROBES]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_zero_on_low_degree(k):
    f = corpus_lookup("poly(" + ",".join(["0.7", "-1.3", "2.1", "0.4"][:k]) + ")")
    assert modulus(f, k, 0.8, I).value <= 1e-12
    assert modulus_curve(f, k, I).values.max() <= 1e-12


def test_curve_matches_pointwise_estimate_on_grid_steps():
    f = corpus_lookup("exp")
    curve = modulus_curve(f, 2, I, grid_x=512, grid_u=512)
    t = curve.breaks[40]
    assert curve.eval(t) == pytest.approx(modulus(f, 2, t, I).value, rel=1e-2)


def test_estimate_is_nondecreasing_on_fine_probes():
    f = corpus_lookup("sin")
    vals = [modulus(f, 2, t, I, grid_x=256, grid_u=64).value for t in np.linspace(0.3, 1.0, 40)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_symmetric_difference_outside_is_zero():
    f = corpus_lookup("x^2")
    assert symmetric_difference(f, 2, 0.5, 0.0, I) == pytest.approx(0.5)
    assert symmetric_difference(f, 2, 0.5, 0.9, I) == 0.0
    with pytest.raises(DomainError):
        symmetric_difference(f, 0, 0.5, 0.0, I)


def test_phi_from_omega_is_admissible():
    omega = PowerModulus(0.5, declared_domain=4.0)
    for k in (2, 3, 4):
        phi = phi_from_omega(omega, k, 1.0)
        check_phi_membership(phi, T=2.0)
        ts = np.linspace(1e-3, 0.5, 50)
        e = 1.5 - k
        tail = ts ** (k - 1) * (1.0 - ts ** e) / e
        assert np.all(phi.eval(ts) <= tail * (1 + 1e-9))
        assert phi.eval(0.5) > 0


def test_marchaud_on_square():
    # omega_2(x^2, u) = 2u^2 capped at u = 1; value at t = 1/2 is 1.25
    v = marchaud_rhs(corpus_lookup("x^2"), 1, 2, 0.5, I)
    assert v == pytest.approx(1.25, rel=0.01)
    with pytest.raises(DomainError):
        marchaud_rhs(corpus_lookup("x^2"), 2, 2, 0.5, I)


@pytest.mark.parametrize("ident", ["exp", "sin", "abs(0.2,1.5)", "tpow(0.1,2)"])
def test_standard_modulus_inequalities(ident):
    f = corpus_lookup(ident)
    sup = float(np.max(np.abs(f(np.linspace(-1, 1, 4097)))))
    for t in (0.1, 0.4, 0.9):
        prev = None
        for k in (1, 2, 3):
            w = modulus(f, k, t, I, grid_x=512, grid_u=128).value
            assert w <= 2 ** k * sup * (1 + 1e-12)
            if prev is not None:
                # both sides are grid lower bounds; the split stencils miss the k-1 centre grid
                assert w <= 2 * prev * (1 + 1e-3)
            prev = w


def test_estimator_is_a_lower_bound_of_closed_form():
    f = corpus_lookup("x^2")
    for t in (0.13, 0.5, 0.77):
        est = modulus(f, 2, t, I).value
        assert est <= 2 * t * t * (1 + 1e-12)
        assert 2 * t * t <= est / (1 - 0.02)
