import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from numerics import DomainError
from symbolic import (BETA, INV_ONE_MINUS_BETA, MAIN, NINV, ONE, ONE_MINUS_BETA, ZERO, ExactPoly,
                      ExpPoly, poly_add, poly_eval, poly_mul, poly_sub)

small_coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def exact_polys(draw):
    terms = draw(st.dictionaries(
        st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
        small_coefficients, max_size=4))
    return ExactPoly(terms, draw(st.integers(0, 2)))


def test_denominator_cancellation():
    assert poly_mul(ONE_MINUS_BETA, INV_ONE_MINUS_BETA) == ONE


def test_additive_inverse():
    a = ExactPoly.beta_poly([1, 4, -2])
    assert poly_add(a, ExactPoly.beta_poly([-1, -4, 2])) == ZERO
    assert poly_sub(a, a).is_zero()


def test_monomial_product():
    left = ONE_MINUS_BETA ** 2 * MAIN ** 2
    assert poly_mul(left, ONE_MINUS_BETA * MAIN) == ONE_MINUS_BETA ** 3 * MAIN ** 3


def test_canonical_form_strips_one_minus_beta():
    # (1 - beta^2)/(1-beta)^2 = (1 + beta)/(1 - beta)
    value = ExactPoly.beta_poly([1, 0, -1], denom_pow=2)
    assert value.denom_pow == 1
    assert value.terms == {(0, 0, 0): 1, (0, 1, 0): 1}
    assert ExactPoly(value.terms, value.denom_pow) == value


def test_zero_drops_denominator():
    assert ExactPoly({(0, 0, 0): 0}, 3).denom_pow == 0


@settings(max_examples=50, deadline=None)
@given(exact_polys(), exact_polys(), exact_polys())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a - a == ZERO


@settings(max_examples=50, deadline=None)
@given(exact_polys(), exact_polys())
def test_evaluation_is_multiplicative(a, b):
    point = (Fraction(3, 2), Fraction(1, 3), 4)
    assert (a * b).evaluate(*point) == a.evaluate(*point) * b.evaluate(*point)
    float_point = (1.5, 1.0 / 3.0, 4.0)
    expected = poly_eval(a, *float_point) * poly_eval(b, *float_point)
    assert poly_eval(a * b, *float_point) == pytest.approx(expected, rel=1e-12, abs=1e-9)


@given(exact_polys(), exact_polys())
def test_arithmetic_leaves_operands_unchanged(a, b):
    before = [(a.terms, a.denom_pow), (b.terms, b.denom_pow)]
    a_again = ExactPoly(a.terms, a.denom_pow)
    for _ in range(2):
        a + b
        a - b
        a * b
        b + a
        -a
    assert [(a.terms, a.denom_pow), (b.terms, b.denom_pow)] == before
    assert a + b == a_again + b
    assert (a + b) - b == a


def test_sum_with_aligned_denominators_leaves_left_operand_unchanged():
    a = ExactPoly({(1, 0, 0): 1})
    b = ExactPoly({(0, 1, 0): 2})
    total = a + b
    assert a.terms == {(1, 0, 0): Fraction(1)}
    assert total.terms == {(1, 0, 0): Fraction(1), (0, 1, 0): Fraction(2)}


def test_eval_rejects_beta_one():
    with pytest.raises(DomainError):
        poly_eval(INV_ONE_MINUS_BETA, 1.0, 1.0, 2.0)
    assert poly_eval(MAIN, 2.0, 1.0, 3.0) == 2.0


def test_eval_constant_and_ninv():
    assert poly_eval(ONE, 7.0, 0.3, 9.0) == 1.0
    assert poly_eval(NINV ** 2 * MAIN, 3.0, 0.0, 2.0) == pytest.approx(0.75)
    assert poly_eval(NINV.times_n(3), 0.0, 0.0, 2.0) == pytest.approx(4.0)


def test_beta_derivative():
    # d/dbeta beta/(1-beta) = 1/(1-beta)^2
    assert (BETA * INV_ONE_MINUS_BETA).derivative('beta') == INV_ONE_MINUS_BETA ** 2
    assert (BETA ** 3 * MAIN).derivative('beta') == 3 * BETA ** 2 * MAIN


def test_main_derivative_and_coefficients():
    p = 3 * MAIN ** 2 * BETA + MAIN * NINV + 5
    assert p.derivative('main') == 6 * MAIN * BETA + NINV
    assert p.coefficient(2) == 3 * BETA
    assert p.coefficient(0) == ExactPoly.constant(5)
    assert p.degree('main') == 2
    assert p.leading_coefficient() == 3 * BETA


def test_exact_div_beta():
    assert (BETA ** 2 * MAIN).exact_div_beta(1) == BETA * MAIN
    with pytest.raises(DomainError):
        (BETA + 1).exact_div_beta(1)


def test_serialize_round_trip():
    p = ExactPoly.beta_poly([1, 4, -2]) * MAIN * NINV * INV_ONE_MINUS_BETA + Fraction(1, 3)
    assert ExactPoly.deserialize(p.serialize()) == p
    assert p.serialize().splitlines()[0] == "denom_pow 1"


def test_coefficients_must_be_rational():
    with pytest.raises(TypeError):
        ExactPoly({(0, 0, 0): 0.5})


def test_exppoly_derivative():
    # d/dx [x + c e^{-nx}] = 1 - n c e^{-nx}
    expr = ExpPoly(MAIN, BETA)
    derivative = expr.derivative()
    assert derivative.poly_part == ONE
    assert derivative.exp_coeff == -BETA.times_n(1)
    assert derivative.evaluate(0.5, 0.25, 3.0) == pytest.approx(
        1 - 3 * 0.25 * math.exp(-1.5))


def test_exppoly_evaluation_and_limit():
    expr = ExpPoly.one_minus_exp(NINV * BETA) + MAIN
    assert expr.evaluate(1.0, 0.5, 2.0) == pytest.approx(1 + 0.25 * (1 - math.exp(-2.0)))
    assert expr.times_n(1).poly_part.min_degree('ninv') == -1
    with pytest.raises(DomainError):
        expr.times_n(1).limit_large_n()
    assert (expr - MAIN).times_n(1).limit_large_n() == BETA


def test_exppoly_rejects_product_of_exponentials():
    with pytest.raises(DomainError):
        ExpPoly(ONE, ONE) * ExpPoly(ONE, ONE)


def test_exppoly_serialize_round_trip():
    expr = ExpPoly(MAIN ** 2 + NINV, -BETA * INV_ONE_MINUS_BETA * MAIN)
    assert ExpPoly.deserialize(expr.serialize()) == expr
