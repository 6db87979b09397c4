import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from critline.bijet import variable_a
from critline.polynomial import (
    SERIES_SWITCH,
    Polynomial,
    _moment_closed,
    _moment_series,
    compose_affine,
    derivative,
    evaluate,
    exp_moment,
    integrate_poly_exp,
    monomial,
)

coeff = st.floats(-10, 10, allow_nan=False)
coeffs = st.lists(coeff, min_size=0, max_size=7)


def quad_moment(k, a, T):
    # adaptive tanh-sinh quadrature at 30 digits
    with mpmath.workdps(30):
        return float(mpmath.quad(lambda m: m**k * mpmath.exp(-mpmath.mpf(a) * m), [0, T]))


# --- Polynomial basics ------------------------------------------------------


def test_eval_examples():
    assert evaluate(Polynomial([1, -0.955682]), 0.0) == 1.0
    assert evaluate(Polynomial(), 3.7) == 0.0
    assert evaluate(Polynomial([0, -0.144781, 2.33768, -1.1929]), 1.0) == pytest.approx(1.0, abs=1e-5)


def test_zero_polynomial_and_trailing_zeros():
    assert Polynomial([0.0, 0.0]).coeffs == ()
    assert Polynomial([1.0, 2.0, 0.0]) == Polynomial([1.0, 2.0])
    assert Polynomial().degree == -1
    assert Polynomial([5.0]).degree == 0


def test_derivative_examples():
    assert derivative(Polynomial([1, -0.955682])) == Polynomial([-0.955682])
    assert derivative(Polynomial([3.0])) == Polynomial()
    assert derivative(Polynomial([0, 0, 1])) == Polynomial([0, 2])


@given(coeffs)
def test_derivative_drops_degree(c):
    p = Polynomial(c)
    if p.degree >= 1:
        assert derivative(p).degree == p.degree - 1


def test_compose_affine_examples():
    assert compose_affine(Polynomial([0, 1]), -1.0, 0.75) == Polynomial([0.75, -1])
    p = Polynomial([1.5, -2.0, 0.25])
    assert compose_affine(p, 1.0, 0.0) == p
    assert compose_affine(Polynomial([0, 0, 1]), -1.0, 1.0) == Polynomial([1, -2, 1])


@given(coeffs, st.floats(0.2, 3.0), st.floats(-2, 2), st.booleans())
def test_compose_affine_roundtrip(c, s, t, neg):
    s = -s if neg else s
    p = Polynomial(c)
    back = compose_affine(compose_affine(p, s, t), 1.0 / s, -t / s)
    n = max(len(p.coeffs), len(back.coeffs), 1)
    scale = max(1.0, max((abs(v) for v in c), default=0.0))
    assert np.allclose(back.padded(n), p.padded(n), rtol=0, atol=1e-12 * scale * 10 ** len(c))


@given(coeffs, coeffs, st.floats(-2, 2))
def test_ring_operations_pointwise(c1, c2, x):
    p, q = Polynomial(c1), Polynomial(c2)
    tol = 1e-9 * (1 + max(map(abs, c1 + c2), default=0)) ** 2 * 2**14
    assert (p + q)(x) == pytest.approx(p(x) + q(x), abs=tol)
    assert (p - q)(x) == pytest.approx(p(x) - q(x), abs=tol)
    assert (p * q)(x) == pytest.approx(p(x) * q(x), abs=tol)
    assert (2.5 * p)(x) == pytest.approx(2.5 * p(x), abs=tol)


def test_monomial():
    assert monomial(3) == Polynomial([0, 0, 0, 1])
    with pytest.raises(ValueError):
        monomial(-1)


def test_evaluate_is_generic_over_jets():
    p = Polynomial([1.0, 2.0, 3.0])
    x = variable_a(0.5, 0.0, 2, 0)
    j = evaluate(p, x)
    # p(0.5), p'(0.5), p''(0.5)/2
    assert j.coeffs[:, 0] == pytest.approx([2.75, 5.0, 3.0])


# --- exp_moment -------------------------------------------------------------


def test_exp_moment_examples():
    assert exp_moment(0, 0.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert exp_moment(1, 0.0, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert exp_moment(1, 2.0, 1.0) == pytest.approx((1 - 3 * math.exp(-2)) / 4, rel=1e-14)
    assert exp_moment(3, 1.0, 0.0) == 0.0


GRID = list(
    itertools.product(range(7), [-2, -0.4, -1e-6, 0, 1e-6, 0.4, 2], [0.1, 0.5, 1.0])
)


@pytest.mark.parametrize("k,a,T", GRID)
def test_exp_moment_against_adaptive_quadrature(k, a, T):
    ref = quad_moment(k, a, T)
    assert abs(exp_moment(k, a, T) - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("k", range(9))
@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("T", [0.25, 0.5, 1.0])
def test_regime_continuity_at_switch(k, sign, T):
    a = sign * SERIES_SWITCH / T
    s, c = _moment_series(k, a, T), _moment_closed(k, a, T)
    assert abs(s - c) <= 1e-12 * abs(s)


@pytest.mark.parametrize("k,a,T", [(0, 1.3, 0.7), (2, -0.3, 0.9), (5, 2.0, 0.4), (3, 1e-7, 0.6)])
def test_derivative_in_T(k, a, T):
    h = 1e-5
    fd = (exp_moment(k, a, T + h) - exp_moment(k, a, T - h)) / (2 * h)
    assert fd == pytest.approx(T**k * math.exp(-a * T), rel=1e-6)


@given(st.integers(0, 10), st.floats(-6, 6), st.floats(0.01, 1.0))
@settings(max_examples=200)
def test_exp_moment_property(k, a, T):
    ref = quad_moment(k, a, T)
    assert abs(exp_moment(k, a, T) - ref) <= 1e-10 * abs(ref)


def test_exp_moment_jet_matches_parameter_derivative():
    # d/da int mu^k e^{-a mu} = -int mu^(k+1) e^{-a mu}
    for a0 in (-1.4, 0.0, 0.2, 0.9):
        j = exp_moment(2, variable_a(a0, 0.0, 2, 0), 0.8)
        assert j.value == pytest.approx(exp_moment(2, a0, 0.8), rel=1e-14)
        assert j.coeffs[1, 0] == pytest.approx(-exp_moment(3, a0, 0.8), rel=1e-12)
        assert j.coeffs[2, 0] == pytest.approx(exp_moment(4, a0, 0.8) / 2, rel=1e-12)


def test_exp_moment_rejects_bad_input():
    with pytest.raises(ValueError):
        exp_moment(-1, 1.0, 1.0)
    with pytest.raises(ValueError):
        exp_moment(1, 1.0, -0.5)


# --- integrate_poly_exp -----------------------------------------------------


def test_integrate_poly_exp_examples():
    assert integrate_poly_exp(Polynomial(), 1.0, 1.0) == 0.0
    assert integrate_poly_exp(Polynomial([1]), 0.0, 0.5) == pytest.approx(0.5, rel=1e-15)
    assert integrate_poly_exp(Polynomial([0, 1]), 1.0, 1.0) == pytest.approx(1 - 2 / math.e, rel=1e-14)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(-3, 3), st.floats(0.05, 1.0))
@settings(max_examples=100)
def test_integrate_poly_exp_against_quadrature(c, a, T):
    p = Polynomial(c)
    ref, _ = quad(lambda m: p(m) * math.exp(-a * m), 0.0, T, epsabs=1e-13, epsrel=1e-13)
    scale = quad(lambda m: abs(p(m)) * math.exp(-a * m), 0.0, T, epsabs=1e-13)[0]
    assert abs(integrate_poly_exp(p, a, T) - ref) <= 1e-10 * max(scale, 1e-12)
