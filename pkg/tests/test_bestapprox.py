import itertools

import numpy as np
import pytest

from divlab import Interval, corpus_lookup, remez_discrete
from divlab.bestapprox import chebyshev_grid
from divlab.errors import DomainError

I = Interval(-1.0, 1.0)


def test_abs_degree_one():
    res = remez_discrete(corpus_lookup("abs(0,1)"), 1, I)
    assert res.converged
    assert abs(res.error - 0.5) <= 1e-6
    h = np.max(np.diff(chebyshev_grid(I, 4096)))
    assert np.allclose(sorted(res.equioscillation_points), [-1, 0, 1], atol=h)
    assert np.allclose(res.polynomial.coeffs[:1], [0.5], atol=1e-6)


def test_brute_force_coefficient_grid():
    # best a + b x for |x|: search a coarse coefficient grid on the same nodes
    xs = np.linspace(-1, 1, 201)
    best = min(np.max(np.abs(np.abs(xs) - a - b * xs))
               for a, b in itertools.product(np.linspace(0, 1, 101), np.linspace(-0.5, 0.5, 51)))
    assert best == pytest.approx(0.5, abs=1e-12)
    assert remez_discrete(corpus_lookup("abs(0,1)"), 1, I).error == pytest.approx(best, abs=1e-6)


def test_constant_for_identity():
    res = remez_discrete(corpus_lookup("x"), 0, Interval(0.0, 1.0))
    assert res.error == pytest.approx(0.5, abs=1e-12)


def test_exact_polynomial_is_reproduced():
    res = remez_discrete(corpus_lookup("poly(1,2,3)"), 2, I)
    assert res.error <= 1e-13
    assert np.allclose(res.polynomial.coeffs, [1, 2, 3])


def test_exp_alternation():
    f = corpus_lookup("exp")
    res = remez_discrete(f, 3, I)
    pts = np.array(res.equioscillation_points)
    resid = f(pts) - res.polynomial(pts)
    assert len(pts) == 5
    assert np.all(np.sign(resid[1:]) == -np.sign(resid[:-1]))
    assert np.allclose(np.abs(resid), res.error, rtol=1e-6)


def test_iteration_cap_is_reported():
    res = remez_discrete(corpus_lookup("abs(0.1,0.5)"), 6, I, max_iter=1)
    assert not res.converged and res.iterations == 1


@pytest.mark.parametrize("n,grid", [(-1, 100), (5, 4)])
def test_bad_arguments(n, grid):
    with pytest.raises(DomainError):
        remez_discrete(corpus_lookup("exp"), n, I, grid=grid)
