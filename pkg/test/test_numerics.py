import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy import special

from numerics import (DomainError, QuadratureError, SeriesQuadConfig, hyp1f1_terminating,
                      integrate_halfline, log_hyp1f1_positive, pochhammer, tricomi_u_oracle)


def test_config_defaults():
    cfg = SeriesQuadConfig()
    assert cfg.k_max == 20000
    assert cfg.tail_tol == 1e-12
    assert cfg.quad_rel_tol == 1e-10
    assert cfg.quad_max_subdiv == 200


@pytest.mark.parametrize("kwargs", [{'k_max': 0}, {'tail_tol': 0.0}, {'quad_rel_tol': -1.0},
                                    {'quad_max_subdiv': 0}, {'k_max': 2.5}])
def test_config_rejects_invalid(kwargs):
    with pytest.raises(DomainError):
        SeriesQuadConfig(**kwargs)


def test_pochhammer_values():
    assert pochhammer(5, 0) == 1
    assert pochhammer(3, 4) == 3 * 4 * 5 * 6
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)
    assert pochhammer(-2, 3) == 0
    assert pochhammer(2.5, 3) == pytest.approx(2.5 * 3.5 * 4.5, rel=1e-14)


@given(st.integers(min_value=-20, max_value=20), st.integers(min_value=0, max_value=8),
       st.integers(min_value=0, max_value=8))
def test_pochhammer_splits(a, m, j):
    # (a)_{m+j} = (a)_m (a+m)_j
    assert pochhammer(a, m + j) == pochhammer(a, m) * pochhammer(a + m, j)


def test_pochhammer_rejects_negative_order():
    with pytest.raises(DomainError):
        pochhammer(2, -1)


def test_hyp1f1_zero_argument():
    assert hyp1f1_terminating(-3, -7, 0) == 1
    assert hyp1f1_terminating(2.5, 1.0, 0) == 1


def test_hyp1f1_exact_polynomial():
    # 1F1(-2; b; z) = 1 - 2z/b + z^2/(b(b+1))
    b, z = Fraction(-5), Fraction(3, 2)
    expected = 1 - 2 * z / b + z ** 2 / (b * (b + 1))
    assert hyp1f1_terminating(-2, b, z) == expected


def test_hyp1f1_matches_scipy():
    assert hyp1f1_terminating(-4, 2.5, 0.7) == pytest.approx(special.hyp1f1(-4, 2.5, 0.7),
                                                             rel=1e-13)


def test_hyp1f1_domain():
    with pytest.raises(DomainError):
        hyp1f1_terminating(1.5, 2.0, 1.0)
    with pytest.raises(DomainError):
        hyp1f1_terminating(-3, -1, 1.0)


@pytest.mark.parametrize("k,r,beta", [(3, 0, 0.5), (10, 2, 0.25), (30, 5, 0.9)])
def test_log_hyp1f1_matches_exact(k, r, beta):
    z = (k - 1) * Fraction(beta)
    exact = hyp1f1_terminating(2 - k, 1 - r - k, z)
    assert log_hyp1f1_positive(2 - k, 1 - r - k, float(z)) == pytest.approx(
        math.log(exact), rel=1e-12, abs=1e-13)


def test_tricomi_u_known_value():
    # U(1, 1, z) = e^z E_1(z)
    z = 2.0
    assert tricomi_u_oracle(1, 1, z) == pytest.approx(math.exp(z) * special.exp1(z), rel=1e-8)


def test_tricomi_u_matches_scipy():
    assert tricomi_u_oracle(3, 7, 1.5) == pytest.approx(special.hyperu(3, 7, 1.5), rel=1e-8)


def test_tricomi_u_domain():
    with pytest.raises(DomainError):
        tricomi_u_oracle(0, 2, 1.0)


def test_integrate_halfline_gamma():
    assert integrate_halfline(lambda t: t ** 3 * math.exp(-t)) == pytest.approx(6.0, rel=1e-9)
    peaked = integrate_halfline(lambda t: math.exp(-(t - 50.0) ** 2), center=50.0, width=1.0)
    assert peaked == pytest.approx(math.sqrt(math.pi), rel=1e-9)


def test_integrate_halfline_reports_failure():
    cfg = SeriesQuadConfig(quad_rel_tol=1e-14, quad_max_subdiv=1)
    with pytest.raises(QuadratureError):
        integrate_halfline(lambda t: math.sin(50.0 * t) * math.exp(-t), cfg)


def test_integrate_halfline_absolute_tolerance_for_vanishing_integral():
    def odd(t):
        return (t - 50.0) * math.exp(-(t - 50.0) ** 2)

    value = integrate_halfline(odd, center=50.0, width=1.0, epsabs=1e-12)
    assert value == pytest.approx(0.0, abs=1e-10)


def test_integrate_halfline_oscillating_window():
    # sin against a wide window: the result is small next to the mass of the window
    def weight(t):
        return math.sin(t) * math.exp(-(t - 3.6) ** 2 / 25.0)

    cfg = SeriesQuadConfig(quad_rel_tol=1e-10)
    mass = 5.0 * math.sqrt(math.pi)
    value = integrate_halfline(weight, cfg, center=3.6, width=3.6, epsabs=cfg.quad_rel_tol * mass)
    left = integrate_halfline(weight, cfg, epsabs=cfg.quad_rel_tol * mass)
    assert value == pytest.approx(left, abs=1e-8)
