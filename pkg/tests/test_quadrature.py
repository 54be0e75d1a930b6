import math

import numpy as np
import pytest

from divlab.errors import AccuracyError, DomainError
from divlab.quadrature import QuadratureSpec, geometric_edges, integrate, integrate_panels

SPEC = QuadratureSpec(method="adaptive-boole", rtol=1e-12)


@pytest.mark.parametrize("fn,a,b,want", [
    (np.exp, 0.0, 1.0, math.e - 1),
    (lambda u: 1 / u, 1e-6, 1.0, math.log(1e6)),
    (lambda u: u ** -3.5 * np.sqrt(u), 1e-3, 2.0, (1e-3 ** -2 - 2.0 ** -2) / 2),
    (np.abs, -1.0, 2.0, 2.5),
])
def test_known_integrals(fn, a, b, want):
    val, err = integrate(fn, a, b, SPEC)
    assert val == pytest.approx(want, rel=1e-10)
    assert err >= 0


def test_reversed_limits_give_zero():
    assert integrate(np.exp, 1.0, 0.0) == (0.0, 0.0)


def test_panels_sum_to_whole():
    edges = geometric_edges(1e-4, 1.0)
    assert edges[0] == pytest.approx(1e-4) and edges[-1] == pytest.approx(1.0)
    vals, _ = integrate_panels(lambda u: u ** -2, edges, SPEC)
    assert vals.sum() == pytest.approx(1e4 - 1, rel=1e-10)


def test_depth_exhaustion_raises():
    with pytest.raises(AccuracyError):
        integrate(lambda u: np.sin(1 / u), 1e-6, 1.0,
                  QuadratureSpec(method="adaptive-boole", rtol=1e-14, max_depth=3))


@pytest.mark.parametrize("kw", [{"rtol": 0.0}, {"method": "gauss"}])
def test_bad_spec(kw):
    with pytest.raises(DomainError):
        QuadratureSpec(**kw)
