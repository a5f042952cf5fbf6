import pytest
import numpy as np

import squatcalc as sq
from squatcalc.quadrature import (
    DEFAULT_QUAD,
    QuadSpec,
    check_tail,
    composite_rule,
    gauss_legendre,
    half_line_rule,
    log_rule,
    monomial_integral,
    monomial_log_integral,
)


@pytest.mark.parametrize("order", [1, 4, 9])
def test_gauss_legendre_exactness(order):
    x, w = gauss_legendre(order)
    for k in range(2 * order):
        expected = 0.0 if k % 2 else 2.0 / (k + 1)
        assert np.sum(w * x**k) == pytest.approx(expected, abs=1e-13)


def test_gauss_legendre_is_cached_and_readonly():
    x, w = gauss_legendre(5)
    assert gauss_legendre(5)[0] is x
    with pytest.raises(ValueError):
        x[0] = 0.0


@pytest.mark.parametrize("panels", [1, 3, 10])
def test_composite_rule(panels):
    x, w = composite_rule(-1.0, 2.0, panels, 6)
    assert x.shape == w.shape == (panels * 6,)
    assert np.all(np.diff(x) > 0)
    assert np.sum(w) == pytest.approx(3.0)
    assert np.sum(w * np.exp(x)) == pytest.approx(np.exp(2) - np.exp(-1))


@pytest.mark.parametrize(("p", "a", "b", "expected"), [
    (-0.5, 0.0, 1.0, 2.0),
    (2.0, 0.0, 3.0, 9.0),
    (-2.0, 1.0, np.inf, 1.0),
    (-1.5, 4.0, np.inf, 1.0),
])
def test_monomial_integral(p, a, b, expected):
    assert monomial_integral(p, a, b) == pytest.approx(expected)


@pytest.mark.parametrize(("p", "a", "b"), [
    (-1.0, 0.0, 1.0),
    (-0.5, 1.0, np.inf),
])
def test_monomial_integral_divergent(p, a, b):
    with pytest.raises(ValueError):
        monomial_integral(p, a, b)
    with pytest.raises(ValueError):
        monomial_log_integral(p, a, b)


@pytest.mark.parametrize("p", [-0.7, 0.0, 1.5])
def test_monomial_log_integral_at_zero(p):
    assert monomial_log_integral(p, 0.0, 1.0) == pytest.approx(
        -1.0 / (p + 1)**2)


@pytest.mark.parametrize("p", [-2.0, -3.0])
def test_monomial_log_integral_at_infinity(p):
    assert monomial_log_integral(p, 1.0, np.inf) == pytest.approx(
        1.0 / (p + 1)**2)
    x, w = log_rule(1.0, 1e12, 64, 16)
    approx = np.sum(w * x**p * np.log(x))
    assert approx == pytest.approx(1.0 / (p + 1)**2, rel=1e-9)


def test_log_rule():
    lo, hi = 1e-6, 1e6
    t, w = log_rule(lo, hi, 32, 16)
    assert np.all((t > lo) & (t < hi))
    approx = np.sum(w / (1 + t)**2)
    assert approx == pytest.approx(1 / (1 + lo) - 1 / (1 + hi), rel=1e-10)
    with pytest.raises(ValueError):
        log_rule(0.0, 1.0, 4, 4)


def test_half_line_rule_truncation():
    spec = QuadSpec(panels=8, order=8, eps=1e-4, Lam=1e3)
    t, w, lo, hi = half_line_rule(spec, 0.5, 4.0)
    assert (lo, hi) == pytest.approx((5e-5, 4e3))
    assert len(t) == 64


def test_quad_spec():
    spec = QuadSpec(panels=10, order=4)
    assert spec.refined().panels == 20
    assert spec.refined(3).order == 4
    assert spec.as_dict() == {'panels': 10, 'order': 4, 'eps': 1e-8,
                              'Lam': 1e8, 'tol': 1e-8}
    assert repr(DEFAULT_QUAD).startswith("QuadSpec(panels=64")


@pytest.mark.parametrize("kwargs", [
    {'panels': 0},
    {'order': 0},
    {'eps': 0.0},
    {'eps': 2.0},
    {'Lam': 0.5},
    {'tol': -1.0},
])
def test_quad_spec_validation(kwargs):
    with pytest.raises(ValueError):
        QuadSpec(**kwargs)


def test_check_tail_warns():
    spec = QuadSpec(tol=1e-6)
    with pytest.warns(sq.QuadratureWarning, match="Truncation tail"):
        check_tail(1e-3, spec, 'test integral')
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        check_tail(1e-9, spec)
