# Exact moment objects of the Jain operator B_n and its Phillips-type
# modification P_n.
#
# Symbol binding: P-polynomials use main = k (the basis index at which the
# inner-product ratio is evaluated, so P_r(k-1; beta) of the literature is
# stored as a polynomial in k). B, T, f and mu use main = x.
import logging
from fractions import Fraction
from functools import lru_cache

from basis import basis_moment_ratio
from numerics import DomainError, RangeError, hyp1f1_terminating, pochhammer
from symbolic import (BETA, INV_ONE_MINUS_BETA, MAIN, NINV, ONE, ONE_MINUS_BETA, ZERO,
                      ExactPoly, ExpPoly, binomial)

logger = logging.getLogger(__name__)

CLOSED_P_MAX = 5
CLOSED_B_MAX = 5
CLOSED_T_MAX = 3
CLOSED_F_MAX = 5
CLOSED_MU_MAX = 5

U = ONE_MINUS_BETA
INV_U = INV_ONE_MINUS_BETA


def _bp(*coefficients):
    return ExactPoly.beta_poly(coefficients)


def _check_order(r, low, high, table):
    if int(r) != r or r < low:
        raise RangeError("order {} below the {} table (starts at {})".format(r, table, low))
    if high is not None and r > high:
        raise RangeError("order {} beyond the {} table (ends at {})".format(r, table, high))
    return int(r)


# --- P_r: inner-product ratios as polynomials in k -------------------------

# coefficient table of the closed forms, a_s^r
A_TABLE = {
    (1, 2): _bp(1, 4, -2),
    (1, 3): _bp(1, 1, -3, 1),
    (2, 3): _bp(2, 4, 6, -12, 3),
    (1, 4): _bp(3, -2, -7, 8, -2),
    (2, 4): _bp(11, 16, 6, -24, 6),
    (3, 4): _bp(3, 5, 5, 5, -10, 2),
    (1, 5): U ** 3 * _bp(2, 2, -1),
    (2, 5): U * _bp(7, 8, 0, -8, 2),
    (3, 5): _bp(10, 6, -3, -8, -12, 12, -2),
    (4, 5): _bp(24, 36, 30, 20, 15, -30, 5),
}


def _p_constant(r):
    """beta^r (r+1-beta) / (1-beta), the k-free term of n^r P_r."""
    return BETA ** r * _bp(r + 1, -1) * INV_U


@lru_cache(maxsize=None)
def p_poly_closed(r):
    """Closed form of P_r(k-1; beta) for r <= 5, as a polynomial in k.

    Raises:
        RangeError: r > 5
    """
    r = _check_order(r, 0, CLOSED_P_MAX, "closed P")
    k = MAIN
    a = A_TABLE
    if r == 0:
        body = ONE
    elif r == 1:
        body = U * k + BETA * _bp(2, -1) * INV_U
    elif r == 2:
        body = U ** 2 * k ** 2 + a[1, 2] * k + _p_constant(2)
    elif r == 3:
        body = U ** 3 * k ** 3 + 3 * a[1, 3] * k ** 2 + a[2, 3] * k * INV_U + _p_constant(3)
    elif r == 4:
        body = (U ** 4 * k ** 4 + 2 * a[1, 4] * k ** 3 + a[2, 4] * k ** 2
                + 2 * a[3, 4] * k * INV_U + _p_constant(4))
    else:
        body = (U ** 5 * k ** 5 + 5 * a[1, 5] * k ** 4 + 5 * a[2, 5] * k ** 3
                + 5 * a[3, 5] * k ** 2 * INV_U + a[4, 5] * k * INV_U + _p_constant(5))
    return NINV ** r * body


@lru_cache(maxsize=None)
def p_poly_recur(r):
    """P_r from P_0 = 1 and the closed P_1 through the three-term recurrence

        n^2 P_{r+2} = n [(1-beta)(k-1) + r + 2] P_{r+1} + beta (r+2)(k-1) P_r.
    """
    r = _check_order(r, 0, None, "P recurrence")
    if r < 2:
        return p_poly_closed(r)
    s = r - 2
    k_minus_one = MAIN - 1
    return (NINV * (U * k_minus_one + s + 2) * p_poly_recur(s + 1)
            + NINV ** 2 * BETA * (s + 2) * k_minus_one * p_poly_recur(s))


def p_recurrence_residual(r, polys=p_poly_recur):
    """n^2 P_{r+2} - n[(1-beta)(k-1)+r+2] P_{r+1} - beta(r+2)(k-1) P_r, scaled by ninv^2."""
    k_minus_one = MAIN - 1
    return (polys(r + 2) - NINV * (U * k_minus_one + r + 2) * polys(r + 1)
            - NINV ** 2 * BETA * (r + 2) * k_minus_one * polys(r))


def p_ratio_exact(r, k, beta):
    """Exact n^r <L_{n,k-1}, t^r> / <L_{n,k-1}, 1> for rational beta.

    The ratio is (k)_r 1F1(2-k; 1-r-k; c) / 1F1(2-k; 1-k; c), c = (k-1) beta,
    and carries the factor n^{-r} which is removed here. It obeys the same
    three-term recurrence as P_r for every k >= 1 but matches the polynomial
    P_r only at beta = 0.
    """
    if int(k) != k or k < 1:
        raise DomainError("Invalid basis index {}".format(k))
    beta = Fraction(beta)
    if not 0 <= beta < 1:
        raise DomainError("Invalid beta {}".format(beta))
    c = (k - 1) * beta
    numerator = hyp1f1_terminating(2 - k, 1 - r - k, c)
    denominator = hyp1f1_terminating(2 - k, 1 - k, c)
    return Fraction(pochhammer(k, r)) * numerator / denominator


def p_ratio_float(p, r, k):
    return basis_moment_ratio(p, k, r)


# --- B_n moments ---------------------------------------------------------

@lru_cache(maxsize=None)
def b_moment_closed(r):
    """B_n(t^r, x) for r <= 5, polynomial in x."""
    r = _check_order(r, 0, CLOSED_B_MAX, "closed B-moment")
    x = MAIN
    ninv_u = NINV * INV_U
    if r == 0:
        return ONE
    elif r == 1:
        return x * INV_U
    elif r == 2:
        return x ** 2 * INV_U ** 2 + x * NINV * INV_U ** 3
    elif r == 3:
        return (x ** 3 * INV_U ** 3 + 3 * x ** 2 * ninv_u * INV_U ** 3
                + _bp(1, 2) * x * NINV ** 2 * INV_U ** 5)
    elif r == 4:
        return (x ** 4 * INV_U ** 4 + 6 * x ** 3 * NINV * INV_U ** 5
                + _bp(7, 8) * x ** 2 * NINV ** 2 * INV_U ** 6
                + _bp(1, 8, 6) * x * NINV ** 3 * INV_U ** 7)
    return (x ** 5 * INV_U ** 5 + 10 * x ** 4 * NINV * INV_U ** 6
            + 5 * _bp(5, 4) * x ** 3 * NINV ** 2 * INV_U ** 7
            + 15 * _bp(1, 4, 2) * x ** 2 * NINV ** 3 * INV_U ** 8
            + _bp(1, 22, 58, 24) * x * NINV ** 4 * INV_U ** 9)


@lru_cache(maxsize=None)
def b_cumulant(r):
    """r-th cumulant of t under B_n(., x).

    With nt a generalized Poisson count of parameters (nx, beta),
    kappa_1 = x/(1-beta) and kappa_{r+1} = (kappa_r + beta d/dbeta kappa_r) / (n(1-beta)).
    """
    r = _check_order(r, 1, None, "cumulant")
    if r == 1:
        return MAIN * INV_U
    previous = b_cumulant(r - 1)
    return (previous + BETA * previous.derivative('beta')) * NINV * INV_U


@lru_cache(maxsize=None)
def b_moment_general(r):
    """B_n(t^r, x) for any r, raw moments from the cumulants."""
    r = _check_order(r, 0, None, "B-moment")
    if r == 0:
        return ONE
    total = ZERO
    for j in range(r):
        total = total + binomial(r - 1, j) * b_cumulant(j + 1) * b_moment_general(r - 1 - j)
    return total


# --- T_{n,r} = P_n(t^r, x) -----------------------------------------------

@lru_cache(maxsize=None)
def t_moment_closed(r):
    r = _check_order(r, 0, CLOSED_T_MAX, "closed T-moment")
    x = MAIN
    if r == 0:
        return ExpPoly(ONE)
    elif r == 1:
        return x + ExpPoly.one_minus_exp(BETA * _bp(2, -1) * NINV * INV_U)
    elif r == 2:
        return (x ** 2 + 2 * _bp(1, 2, -1) * x * NINV * INV_U
                + ExpPoly.one_minus_exp(BETA ** 2 * _bp(3, -1) * NINV ** 2 * INV_U))
    return (x ** 3 + 3 * _bp(2, 2, -1) * x ** 2 * NINV * INV_U
            + 3 * _bp(2, 4, 1, -4, 1) * x * NINV ** 2 * INV_U ** 2
            + ExpPoly.one_minus_exp(BETA ** 3 * _bp(4, -1) * NINV ** 3 * INV_U))


@lru_cache(maxsize=None)
def t_moment_general(r):
    """T_{n,r} from the k-expansion of P_r.

    With P_r(k) = sum_s p_s k^s and sum_{k>=0} k^s L_{n,k} = n^s B_n(t^s),
    T_r = sum_{s>=1} p_s n^s B_n(t^s) + p_0 (1 - e^{-nx}), plus e^{-nx} f(0)
    which is nonzero only for r = 0.
    """
    r = _check_order(r, 0, None, "T-moment")
    p = p_poly_recur(r)
    total = ExpPoly.one_minus_exp(p.coefficient(0))
    for s in range(1, p.degree('main') + 1):
        total = total + p.coefficient(s).times_n(s) * b_moment_general(s)
    if r == 0:
        total = total + ExpPoly(ZERO, ONE)
    return total


# --- f_{n,r}: polynomial part of T_{n,r} -----------------------------------

B_TABLE = {
    (3, 4): _bp(6, 12, 6, -8, -6, 6, -1),
    (3, 5): _bp(24, 36, 6, -20, -3, 6, -1),
    (4, 5): _bp(24, 48, 48, -8, -31, 8, 14, -8, 1),
}


def b_coefficient(j, r):
    """b_j^r of the closed polynomial f_{n,r}."""
    if j == 0:
        return ONE
    elif j == 1:
        return _bp(r - 1, 2, -1)
    elif j == 2 and r >= 3:
        return _bp((r - 1) * (r - 2), 4 * (r - 2), 7 - 2 * r, -4, 1)
    elif (j, r) in B_TABLE:
        return B_TABLE[j, r]
    raise RangeError("no coefficient b_{}^{} in the closed f table".format(j, r))


@lru_cache(maxsize=None)
def f_poly_closed(r):
    """f_{n,r}(x) = sum_{j<r} C(r,j) b_j^r x^{r-j} / (n(1-beta))^j
    + (beta/n)^r (r+1-beta)/(1-beta)."""
    r = _check_order(r, 0, CLOSED_F_MAX, "closed f")
    total = (BETA * NINV) ** r * _bp(r + 1, -1) * INV_U
    for j in range(r):
        total = total + binomial(r, j) * b_coefficient(j, r) * MAIN ** (r - j) * (NINV * INV_U) ** j
    return total


# alpha_j^r of the f-recurrence, as printed
ALPHA_PRINTED = {
    (1, 'r'): lambda r: (r - 1) * _bp(r - 2, 4, -1),
    (2, 'r'): lambda r: (r - 2) * (r - 3) * _bp(2, 2 * r - 5, 1),
    (3, 4): lambda r: 6 * _bp(1, 6, -1),
    (3, 5): lambda r: 12 * _bp(3, 10, -2),
    (4, 5): lambda r: 48 * _bp(1, 1, 1),
}

# alpha_j^r as reproduced by f_recurrence_coefficients
ALPHA_CORRECTED = {
    (1, 'r'): lambda r: (r - 1) * _bp(r - 2, 4, -1),
    (2, 'r'): lambda r: (r - 1) * (r - 2) * _bp(2, 2 * r - 5, 1),
    (3, 4): lambda r: 6 * _bp(1, 6, -1),
    (3, 5): lambda r: 12 * _bp(3, 12, -2),
    (4, 5): lambda r: 12 * _bp(4, 7, 2),
}

ALPHA_TABLES = {'printed': ALPHA_PRINTED, 'corrected': ALPHA_CORRECTED}


def alpha_coefficient(j, r, table='corrected'):
    alphas = ALPHA_TABLES[table]
    if j in (1, 2) and j < r:
        return alphas[j, 'r'](r)
    elif (j, r) in alphas:
        return alphas[j, r](r)
    raise RangeError("no coefficient alpha_{}^{} in the f-recurrence table".format(j, r))


def _f_leading_factor(r):
    """x + (2(r-1) + beta(2-beta)) / (n(1-beta))."""
    return MAIN + _bp(2 * (r - 1), 2, -1) * NINV * INV_U


def f_recurrence_terms(r, alphas, lower):
    """Right-hand side of the f-recurrence from the alphas and f_0..f_{r-1}."""
    total = _f_leading_factor(r) * lower(r - 1)
    for j in range(1, r):
        total = total + ((-1) ** j * BETA ** (j - 1) * alphas[j]
                         * (NINV * INV_U) ** (j + 1) * lower(r - j - 1))
    return total


@lru_cache(maxsize=None)
def f_poly_recur(r, table='corrected'):
    """f_{n,r} for 2 <= r <= 5 from f_{n,r-1}, ..., f_{n,0}."""
    r = _check_order(r, 2, CLOSED_F_MAX, "f-recurrence")
    alphas = {j: alpha_coefficient(j, r, table) for j in range(1, r)}

    def lower(s):
        return f_poly_closed(s) if s < 2 else f_poly_recur(s, table)

    return f_recurrence_terms(r, alphas, lower)


@lru_cache(maxsize=None)
def f_recurrence_coefficients(r):
    """Solve the f-recurrence for alpha_1^r, ..., alpha_{r-1}^r.

    After removing the leading factor times f_{r-1}, the remainder is a
    combination of f_{r-2}, ..., f_0; each f_s has leading term x^s, so the
    alphas follow by peeling off the highest x power one at a time.

    Raises:
        DomainError: the remainder is not of the recurrence's form
    """
    r = _check_order(r, 2, None, "f-recurrence")

    def f_exact(s):
        return t_moment_general(s).poly_part

    remainder = f_exact(r) - _f_leading_factor(r) * f_exact(r - 1)
    alphas = {}
    for j in range(1, r):
        scale = (-1) ** j * BETA ** (j - 1) * (NINV * INV_U) ** (j + 1)
        top = remainder.coefficient(r - j - 1)
        alpha = (top * U ** (j + 1)).times_n(j + 1).exact_div_beta(j - 1) * (-1) ** j
        if alpha.degree('ninv') > 0 or alpha.min_degree('ninv') < 0 or alpha.denom_pow:
            raise DomainError("alpha_{}^{} is not a polynomial in beta: {}".format(j, r, alpha))
        alphas[j] = alpha
        remainder = remainder - scale * alpha * f_exact(r - j - 1)
    if not remainder.is_zero():
        raise DomainError("f_{} does not satisfy the recurrence: remainder {}".format(r, remainder))
    return alphas


# --- central moments mu_{n,r} = P_n((t-x)^r, x) ----------------------------

def exp_factor_f(r):
    """F_{n,r}(x) = sum_{s<r} (-1)^s C(r,s) (beta/n)^{r-s} (r+1-s-beta)/(1-beta) x^s."""
    total = ZERO
    for s in range(r):
        total = total + ((-1) ** s * binomial(r, s) * (BETA * NINV) ** (r - s)
                         * _bp(r + 1 - s, -1) * INV_U * MAIN ** s)
    return total


LAMBDA_TABLE = {
    (3, 5): _bp(12, 12, -6, -4, 9, -6, 1),
    (4, 5): _bp(23, 38, 27, -12, -25, 8, 14, -8, 1),
}


@lru_cache(maxsize=None)
def central_moment_closed(r):
    """Transcribed mu_{n,r} for 1 <= r <= 5: a polynomial plus F_{n,r}(1 - e^{-nx})."""
    r = _check_order(r, 1, CLOSED_MU_MAX, "closed central-moment")
    x = MAIN
    nu = NINV * INV_U
    if r == 1:
        poly = ZERO
    elif r == 2:
        poly = 2 * _bp(1, 2, -1) * x * nu
    elif r == 3:
        poly = (3 * BETA * _bp(-2, 1) * x ** 2 * nu
                + 3 * _bp(2, 4, 1, -1, 1) * x * nu ** 2)
    elif r == 4:
        poly = (4 * BETA * _bp(2, -1) * x ** 3 * nu
                + 2 * _bp(10, 8, -13, 6, 3) * x ** 2 * nu ** 2
                + 4 * _bp(6, 12, 6, -8, -6, 6, -1) * x * nu ** 3)
    else:
        poly = (5 * BETA * _bp(-2, 1) * x ** 4 * nu
                + 10 * BETA ** 2 * _bp(3, -4, 1) * x ** 3 * nu ** 2
                + 10 * LAMBDA_TABLE[3, 5] * x ** 2 * nu ** 3
                + 5 * LAMBDA_TABLE[4, 5] * x * nu ** 4)
    return ExpPoly(poly) + ExpPoly.one_minus_exp(exp_factor_f(r))


@lru_cache(maxsize=None)
def central_moment_derived(r):
    """mu_{n,r} = sum_j C(r,j) (-x)^{r-j} T_{n,j}."""
    r = _check_order(r, 0, None, "central moment")
    total = ExpPoly(ZERO)
    for j in range(r + 1):
        total = total + binomial(r, j) * (-MAIN) ** (r - j) * t_moment_general(j)
    return total


def compare_central_moments(r_max=CLOSED_MU_MAX):
    """Transcribed versus derived central moments, one verdict per order.

    Returns:
        list of dict: r, matches, and the printed-minus-derived difference
    """
    verdicts = []
    for r in range(1, r_max + 1):
        difference = central_moment_closed(r) - central_moment_derived(r)
        matches = difference == ExpPoly(ZERO)
        if not matches:
            logger.warning("transcribed mu_{} differs from the derived moment by {}"
                           .format(r, difference.to_text()), extra={'case': 'r={}'.format(r)})
        verdicts.append({'r': r, 'matches': matches, 'difference': difference})
    return verdicts


def moment_object(kind, r):
    """Symbolic table entry by kind: P (in k), B, f (in x), T and mu (ExpPoly in x)."""
    if kind == 'P':
        return p_poly_recur(r)
    elif kind == 'B':
        return b_moment_general(r)
    elif kind == 'T':
        return t_moment_general(r)
    elif kind == 'f':
        return f_poly_closed(r)
    elif kind == 'mu':
        _check_order(r, 1, None, "central-moment (mu_0 is 1)")
        return central_moment_derived(r)
    raise DomainError("Invalid moment kind {}".format(kind))
