import math
import os
from fractions import Fraction

import pytest

from moment_engine import (A_TABLE, alpha_coefficient, b_coefficient, b_cumulant,
                           b_moment_closed, b_moment_general, central_moment_closed,
                           central_moment_derived, compare_central_moments, exp_factor_f,
                           f_poly_closed, f_poly_recur, f_recurrence_coefficients, moment_object,
                           p_poly_closed, p_poly_recur, p_ratio_exact, p_ratio_float,
                           p_recurrence_residual, t_moment_closed, t_moment_general)
from basis import JainParams
from numerics import DomainError, RangeError
from symbolic import (BETA, INV_ONE_MINUS_BETA, MAIN, NINV, ONE, ONE_MINUS_BETA, ExactPoly,
                      ExpPoly, poly_eval)

GOLDEN_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'golden')

U = ONE_MINUS_BETA


def bp(*coefficients):
    return ExactPoly.beta_poly(coefficients)


def test_p_closed_low_orders():
    assert p_poly_closed(0) == ONE
    expected = NINV ** 2 * (U ** 2 * MAIN ** 2 + bp(1, 4, -2) * MAIN
                            + BETA ** 2 * bp(3, -1) * INV_ONE_MINUS_BETA)
    assert p_poly_closed(2) == expected
    assert poly_eval(p_poly_closed(1), 2, 0.0, 1.0) == 2.0


def test_p_closed_at_beta_zero():
    assert poly_eval(p_poly_closed(1), 7.0, 0.0, 2.0) == pytest.approx(3.5)


def test_p_closed_range():
    with pytest.raises(RangeError):
        p_poly_closed(6)


@pytest.mark.parametrize("r", range(6))
def test_p_recurrence_reproduces_closed_forms(r):
    assert p_poly_recur(r) == p_poly_closed(r)


@pytest.mark.parametrize("r", range(9))
def test_p_recurrence_residual_vanishes(r):
    assert p_recurrence_residual(r).is_zero()


@pytest.mark.parametrize("r", range(9))
def test_p_degree_law(r):
    p = p_poly_recur(r)
    assert p.degree('main') == r
    assert p.leading_coefficient() == (U * NINV) ** r


def test_p_order_six_leading_term():
    assert p_poly_recur(6).leading_coefficient() == U ** 6 * NINV ** 6


def test_p_closed_matches_hypergeometric_ratio_at_beta_zero():
    for r in range(6):
        for k in (1, 2, 9):
            assert p_poly_closed(r).evaluate(k, 0, 1) == p_ratio_exact(r, k, 0)


def test_p2_against_inner_product_route():
    # beta = 0.5 at k = 3 differs from the true ratio; at beta = 0 both agree
    assert poly_eval(p_poly_closed(2), 3, 0.0, 2.0) == pytest.approx(
        p_ratio_float(JainParams(2.0, 0.0), 2, 3), rel=1e-13)


def test_a_table_entries():
    assert A_TABLE[1, 2] == bp(1, 4, -2)
    assert A_TABLE[4, 5] == bp(24, 36, 30, 20, 15, -30, 5)


@pytest.mark.parametrize("k", [1, 2, 3, 6, 11])
@pytest.mark.parametrize("beta", [Fraction(0), Fraction(1, 4), Fraction(2, 3)])
def test_true_ratio_obeys_three_term_recurrence(k, beta):
    u = 1 - beta
    for r in range(4):
        lhs = p_ratio_exact(r + 2, k, beta)
        rhs = ((u * (k - 1) + r + 2) * p_ratio_exact(r + 1, k, beta)
               + beta * (r + 2) * (k - 1) * p_ratio_exact(r, k, beta))
        assert lhs == rhs


def test_true_ratio_small_case():
    assert p_ratio_exact(1, 3, Fraction(1, 2)) == Fraction(8, 3)
    assert p_ratio_exact(0, 5, Fraction(1, 3)) == 1
    with pytest.raises(DomainError):
        p_ratio_exact(1, 0, 0)


def test_true_ratio_float_route():
    p = JainParams(1.0, 0.25)
    assert p_ratio_float(p, 3, 7) == pytest.approx(float(p_ratio_exact(3, 7, Fraction(1, 4))),
                                                   rel=1e-12)


def test_b_moment_closed_values():
    assert b_moment_closed(0) == ONE
    assert b_moment_closed(1) == MAIN * INV_ONE_MINUS_BETA
    assert poly_eval(b_moment_closed(2), 1.0, 0.0, 10.0) == pytest.approx(1.1)
    with pytest.raises(RangeError):
        b_moment_closed(6)


@pytest.mark.parametrize("r", range(6))
def test_b_moment_general_matches_closed(r):
    assert b_moment_general(r) == b_moment_closed(r)


def test_b_cumulants():
    assert b_cumulant(2) == MAIN * NINV * INV_ONE_MINUS_BETA ** 3
    assert b_cumulant(3) == bp(1, 2) * MAIN * NINV ** 2 * INV_ONE_MINUS_BETA ** 5


def test_t_closed_values():
    assert t_moment_closed(0) == ExpPoly(ONE)
    t1 = t_moment_closed(1)
    assert poly_eval(t1.poly_part, 2.0, 0.0, 5.0) == 2.0
    assert t1.exp_coeff.evaluate(0, 0, 5) == 0
    t2 = t_moment_closed(2)
    assert t2.evaluate(1.5, 0.0, 4.0) == pytest.approx(1.5 ** 2 + 2 * 1.5 / 4)
    with pytest.raises(RangeError):
        t_moment_closed(4)


@pytest.mark.parametrize("r", range(4))
def test_t_general_matches_closed(r):
    assert t_moment_general(r) == t_moment_closed(r)


def test_t_general_first_moment_poly_part():
    expected = MAIN + BETA * bp(2, -1) * NINV * INV_ONE_MINUS_BETA
    assert t_moment_general(1).poly_part == expected


@pytest.mark.parametrize("r", range(7))
def test_t_general_collapses_at_beta_zero(r):
    t = t_moment_general(r)
    assert t.exp_coeff.evaluate(1, 0, 3) == 0
    # classical Phillips moments: T_r(x) = sum_j C(r-1, j-1) r!/j! x^j / n^{r-j}
    n = 4
    for x in (Fraction(1, 2), Fraction(3)):
        expected = sum(Fraction(math.comb(r - 1, j - 1) * math.factorial(r), math.factorial(j))
                       * x ** j / Fraction(n) ** (r - j) for j in range(1, r + 1)) if r else 1
        assert t.poly_part.evaluate(x, 0, n) == expected


def test_b_coefficients():
    assert b_coefficient(1, 4) == bp(3, 2, -1)
    assert b_coefficient(2, 3) == bp(2, 4, 1, -4, 1)
    with pytest.raises(RangeError):
        b_coefficient(3, 3)


def test_f_closed_low_orders():
    assert f_poly_closed(0) == ONE
    assert f_poly_closed(1) == MAIN + BETA * bp(2, -1) * NINV * INV_ONE_MINUS_BETA
    with pytest.raises(RangeError):
        f_poly_closed(6)


@pytest.mark.parametrize("r", range(6))
def test_f_is_polynomial_part_of_t(r):
    assert f_poly_closed(r) == t_moment_general(r).poly_part


@pytest.mark.parametrize("r", range(1, 6))
def test_f_constant_term(r):
    constant = f_poly_closed(r).coefficient(0)
    assert constant == (BETA * NINV) ** r * bp(r + 1, -1) * INV_ONE_MINUS_BETA


@pytest.mark.parametrize("r", range(2, 6))
def test_f_recurrence_reproduces_closed(r):
    assert f_poly_recur(r) == f_poly_closed(r)


def test_f_recurrence_range():
    with pytest.raises(RangeError):
        f_poly_recur(6)
    with pytest.raises(RangeError):
        f_poly_recur(1)


@pytest.mark.parametrize("r", range(2, 6))
def test_derived_alpha_matches_table(r):
    derived = f_recurrence_coefficients(r)
    for j in range(1, r):
        assert derived[j] == alpha_coefficient(j, r)


def test_printed_alpha_entries():
    assert alpha_coefficient(1, 3, 'printed') == alpha_coefficient(1, 3, 'corrected')
    assert alpha_coefficient(3, 4, 'printed') == 6 * bp(1, 6, -1)
    assert alpha_coefficient(3, 4, 'printed') == alpha_coefficient(3, 4, 'corrected')
    # printed alpha_2^3 vanishes, the recurrence needs 2(2 + beta + beta^2)
    assert alpha_coefficient(2, 3, 'printed').is_zero()
    assert f_recurrence_coefficients(3)[2] == 2 * bp(2, 1, 1)
    assert f_recurrence_coefficients(5)[3] == 12 * bp(3, 12, -2)
    assert f_recurrence_coefficients(5)[4] == 12 * bp(4, 7, 2)


def test_printed_alpha_fails_recurrence():
    assert f_poly_recur(3, 'printed') != f_poly_closed(3)


def test_exp_factor_f():
    assert exp_factor_f(1) == BETA * NINV * bp(2, -1) * INV_ONE_MINUS_BETA


def test_central_closed_values():
    assert central_moment_closed(1).evaluate(2.0, 0.0, 3.0) == 0.0
    assert central_moment_closed(2).evaluate(1.0, 0.0, 10.0) == pytest.approx(0.2)
    with pytest.raises(RangeError):
        central_moment_closed(0)


def test_central_derived_low_orders():
    assert central_moment_derived(0) == ExpPoly(ONE)
    f1 = exp_factor_f(1)
    assert central_moment_derived(1) == ExpPoly(f1, -f1)


@pytest.mark.parametrize("r", [1, 2])
def test_central_derived_matches_transcription(r):
    assert central_moment_derived(r) == central_moment_closed(r)


def test_central_moment_verdicts():
    verdicts = {v['r']: v for v in compare_central_moments()}
    assert verdicts[1]['matches'] and verdicts[2]['matches']
    assert not verdicts[3]['matches']
    # printed -beta^3 in the x-coefficient of mu_3 should read -4 beta^3
    nu = NINV * INV_ONE_MINUS_BETA
    assert verdicts[3]['difference'] == ExpPoly(9 * BETA ** 3 * MAIN * nu ** 2)
    fixed = central_moment_closed(3) - ExpPoly(9 * BETA ** 3 * MAIN * nu ** 2)
    assert fixed == central_moment_derived(3)
    difference = verdicts[4]['difference']
    assert not verdicts[4]['matches']
    assert difference.exp_coeff.is_zero()
    assert {i for (i, _, _) in difference.poly_part.terms} == {2}


def test_central_moment_four_at_beta_zero():
    # compound Poisson with unit-exponential jumps: mu_4 = 12x^2/n^2 + 24x/n^3
    mu4 = central_moment_derived(4)
    assert mu4.exp_coeff.evaluate(Fraction(1, 2), 0, 8) == 0
    assert mu4.poly_part.evaluate(Fraction(1, 2), 0, 8) == (
        12 * Fraction(1, 4) / 64 + 24 * Fraction(1, 2) / 512)


def test_moment_object_dispatch():
    assert moment_object('P', 2) == p_poly_recur(2)
    assert moment_object('mu', 1) == central_moment_derived(1)
    with pytest.raises(RangeError):
        moment_object('mu', 0)
    with pytest.raises(RangeError):
        moment_object('f', 6)
    with pytest.raises(DomainError):
        moment_object('Q', 1)


GOLDEN_REQUIRED = ([('B', r) for r in (1, 2)] + [('P', r) for r in range(6)]
                   + [('f', r) for r in range(6)] + [('T', r) for r in range(4)]
                   + [('mu', r) for r in range(1, 6)])


@pytest.mark.parametrize("kind,r", GOLDEN_REQUIRED)
def test_golden_files(kind, r):
    path = os.path.join(GOLDEN_DIR, '{}_{}.txt'.format(kind, r))
    assert os.path.isfile(path), path
    with open(path) as golden:
        text = golden.read()
    value = moment_object(kind, r)
    assert value.serialize() == text
    assert type(value).deserialize(text) == value


def test_golden_directory_has_no_strays():
    expected = {'{}_{}.txt'.format(kind, r) for kind, r in GOLDEN_REQUIRED}
    assert set(name for name in os.listdir(GOLDEN_DIR) if name.endswith('.txt')) == expected
