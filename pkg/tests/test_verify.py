import itertools
import math

import pytest
import mpmath

from critline.verify import (
    LEMMA36_GRID,
    LEMMA37_PRIME_SETS,
    PrimeTuplePattern,
    lemma36_residual,
    lemma36_sides,
    lemma37_sides,
    run_checks,
)


def test_depth_one_is_the_same_integral():
    for f in ([1.0], [0.0, 1.0], [2.0, -1.0, 0.5]):
        assert lemma36_residual(1, f, 3.0, 0.1) <= 1e-13


def test_depth_two_closed_form():
    lhs, rhs = lemma36_sides(2, [1.0], math.e, 0.0)
    assert lhs == pytest.approx(0.5, abs=1e-12)
    assert rhs == pytest.approx(0.5, abs=1e-12)
    assert abs(lhs - rhs) <= 1e-10


def test_depth_three_against_quadrature():
    lhs, rhs = lemma36_sides(3, [0.0, 1.0], 5.0, 0.3)
    with mpmath.workdps(30):
        ref = float(mpmath.quad(lambda x: x * mpmath.log(x) ** 2 / (2 * x ** mpmath.mpf("1.3")), [1, 5]))
    assert abs(lhs - rhs) <= 1e-8
    assert rhs == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize(
    "m,f,alpha,D",
    list(itertools.product(LEMMA36_GRID["m"], LEMMA36_GRID["f"], LEMMA36_GRID["alpha"], LEMMA36_GRID["D"])),
)
def test_nested_integral_grid(m, f, alpha, D):
    assert lemma36_residual(m, list(f), D, alpha) <= 1e-8


def test_depth_four_supported():
    assert lemma36_residual(4, [1.0, 1.0], 4.0, 0.1, quad_order=16) <= 1e-8
    with pytest.raises(ValueError):
        lemma36_residual(5, [1.0], 4.0, 0.0)
    with pytest.raises(ValueError):
        lemma36_residual(2, [1.0], 1.0, 0.0)


def test_prime_tuple_small_case():
    lhs, rhs = lemma37_sides(PrimeTuplePattern((2, 3, 5), 1, 1))
    s = math.log(2) + math.log(3) + math.log(5)
    assert lhs == pytest.approx(s * s, rel=1e-15)
    assert abs(lhs - rhs) <= 1e-12 * lhs


@pytest.mark.parametrize("primes", LEMMA37_PRIME_SETS)
@pytest.mark.parametrize("m1,m2", list(itertools.product((1, 2, 3), repeat=2)))
def test_prime_tuple_grid(primes, m1, m2):
    lhs, rhs = lemma37_sides(PrimeTuplePattern(primes, m1, m2))
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_prime_tuple_empty():
    assert lemma37_sides(PrimeTuplePattern((2, 3), 3, 1)) == (0.0, 0.0)


@pytest.mark.parametrize("primes", [(2, 2, 3), (2, 4), (2, 3, 5, 7, 11, 13, 17)])
def test_prime_tuple_validation(primes):
    with pytest.raises(ValueError):
        PrimeTuplePattern(primes, 1, 1)


def test_run_checks_all_pass():
    rows = run_checks()
    assert len(rows) == 81 + 27
    assert all(r["passed"] for r in rows)
