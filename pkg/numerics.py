# Special functions and half-line quadrature used by every numeric evaluation
# in the Jain / Phillips operator code.
#
# Everything in here is a pure function of its arguments so it can be called
# from worker threads without any locking.
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy
from scipy import integrate, special

logger = logging.getLogger(__name__)


class JainError(Exception):
    """Base class for all errors raised by the operator library."""


class DomainError(JainError, ValueError):
    """Argument outside the domain where a formula is defined."""


class RangeError(JainError, ValueError):
    """Requested order beyond an implemented coefficient table."""


class TruncationError(JainError, ArithmeticError):
    """Series did not meet its tail criterion before k_max."""


class QuadratureError(JainError, ArithmeticError):
    """Quadrature did not reach the requested tolerance."""


class ExperimentError(JainError, ArithmeticError):
    """A convergence experiment failed on arguments that passed validation."""


@dataclass(frozen=True)
class SeriesQuadConfig:
    """Truncation and quadrature settings shared by all numeric evaluation.

    Args:
        k_max (int): hard cap on the series index
        tail_tol (float): absolute tolerance for the neglected basis mass
        quad_rel_tol (float): relative tolerance handed to the quadrature
        quad_max_subdiv (int): subdivision limit handed to the quadrature
    """
    k_max: int = 20000
    tail_tol: float = 1e-12
    quad_rel_tol: float = 1e-10
    quad_max_subdiv: int = 200

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise DomainError("Invalid k_max {}".format(self.k_max))
        elif not self.tail_tol > 0:
            raise DomainError("Invalid tail_tol {}".format(self.tail_tol))
        elif not self.quad_rel_tol > 0:
            raise DomainError("Invalid quad_rel_tol {}".format(self.quad_rel_tol))
        elif int(self.quad_max_subdiv) != self.quad_max_subdiv or self.quad_max_subdiv < 1:
            raise DomainError("Invalid quad_max_subdiv {}".format(self.quad_max_subdiv))


DEFAULT_CONFIG = SeriesQuadConfig()


def _is_exact(value):
    return isinstance(value, Rational)


def pochhammer(a, m):
    """Rising factorial (a)_m = a(a+1)...(a+m-1), (a)_0 = 1.

    Integer and Fraction arguments give an exact result, anything else goes
    through scipy.special.poch.
    """
    if m < 0 or int(m) != m:
        raise DomainError("Invalid Pochhammer order {}".format(m))
    m = int(m)
    if _is_exact(a):
        result = Fraction(1)
        for i in range(m):
            result *= a + i
        return result.numerator if result.denominator == 1 else result
    return float(special.poch(a, m))


def log_pochhammer(a, m):
    """log (a)_m for a > 0."""
    if not a > 0:
        raise DomainError("log_pochhammer needs a > 0, got {}".format(a))
    return float(special.gammaln(a + m) - special.gammaln(a))


def _check_terminating(a, z):
    if z == 0:
        return 0
    if int(a) != a or a > 0:
        raise DomainError("1F1 only evaluated in its terminating regime, got a={}".format(a))
    return -int(a)


def hyp1f1_terminating(a, b, z):
    """Kummer function 1F1(a; b; z) for a nonpositive integer a.

    The series is the polynomial sum_{j=0}^{|a|} (a)_j z^j / ((b)_j j!).
    For z = 0 the value is 1 whatever a and b are. Exact inputs (int or
    Fraction) give an exact Fraction.

    Raises:
        DomainError: a not a nonpositive integer (and z != 0), or (b)_j = 0
                     for some j at which (a)_j is still nonzero
    """
    degree = _check_terminating(a, z)
    exact = _is_exact(a) and _is_exact(b) and _is_exact(z)
    term = Fraction(1) if exact else 1.0
    total = term
    for j in range(degree):
        if b + j == 0:
            raise DomainError("1F1 lower parameter b={} hits zero at j={}".format(b, j))
        term = term * (a + j) / (b + j) * z / (j + 1)
        total += term
    return total


def log_hyp1f1_positive(a, b, z):
    """log 1F1(a; b; z) for a terminating series whose terms are all >= 0.

    This is the regime of the basis inner products, a = 2-k, b = 1-r-k,
    z = (k-1)*beta >= 0. The series stops at j = k-2, strictly before
    j = r+k-1 where (b)_j would vanish, so no denominator is ever zero and
    every ratio (a+j)/(b+j) is a quotient of two negative numbers.
    Terms are accumulated in log space because 1F1 grows like e^z.
    """
    degree = _check_terminating(a, z)
    if degree == 0:
        return 0.0
    j = numpy.arange(degree, dtype=float)
    num = a + j
    den = b + j
    if numpy.any(den == 0):
        raise DomainError("1F1 lower parameter b={} hits zero inside the series".format(b))
    ratio = num / den
    if numpy.any(ratio < 0) or z < 0:
        raise DomainError("log_hyp1f1_positive needs nonnegative terms, a={} b={} z={}"
                          .format(a, b, z))
    with numpy.errstate(divide='ignore'):
        steps = numpy.log(ratio) + math.log(z) - numpy.log(j + 1)
    log_terms = numpy.concatenate(([0.0], numpy.cumsum(steps)))
    return float(special.logsumexp(log_terms))


def _checked_quad(func, lower, upper, cfg, points=None, epsabs=0.0):
    """quad with the status read from full_output; no global warning filters.

    A nonzero status is accepted when the reported error still meets
    max(epsabs, quad_rel_tol * |value|).
    """
    kwargs = {'epsabs': epsabs, 'epsrel': cfg.quad_rel_tol, 'limit': cfg.quad_max_subdiv}
    if points is not None and numpy.isfinite(upper):
        kwargs['points'] = points
    result = integrate.quad(func, lower, upper, full_output=1, **kwargs)
    value, abserr = result[0], result[1]
    if len(result) > 3:
        tolerance = max(epsabs, cfg.quad_rel_tol * abs(value))
        if not abserr <= tolerance:
            raise QuadratureError("quad on [{}, {}] failed: {} (abserr {}, epsabs {})"
                                  .format(lower, upper, result[3], abserr, epsabs))
        logger.debug("quad on [{}, {}] accepted at abserr {}: {}"
                     .format(lower, upper, abserr, result[3]), extra={'case': 'N/A'})
    logger.debug("quad on [{}, {}], value, {}, abserr, {}".format(lower, upper, value, abserr),
                 extra={'case': 'N/A'})
    return value, abserr


def tricomi_u_oracle(a, b, z, cfg=DEFAULT_CONFIG):
    """Tricomi U(a, b, z) from its integral representation.

    U(a,b,z) = 1/Gamma(a) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt, a > 0, z > 0.
    Only used to cross-check the hypergeometric closed form of the basis
    inner products.
    """
    if not a > 0 or not z > 0:
        raise DomainError("tricomi_u_oracle needs a > 0 and z > 0, got a={} z={}".format(a, z))
    log_gamma_a = float(special.gammaln(a))

    def integrand(t):
        if t == 0.0:
            return 1.0 / math.exp(log_gamma_a) if a == 1 else 0.0
        return math.exp(-z * t + (a - 1) * math.log(t)
                        + (b - a - 1) * math.log1p(t) - log_gamma_a)

    # the integrand peaks near (a-1)/z for large a; split there
    split = max((a - 1) / z, 1.0)
    head, _ = _checked_quad(integrand, 0.0, split, cfg)
    tail, _ = _checked_quad(integrand, split, numpy.inf, cfg)
    return head + tail


def integrate_halfline(func, cfg=DEFAULT_CONFIG, center=None, width=None, epsabs=0.0):
    """Integral of func over [0, inf).

    With a center/width hint (the basis functions are sharply peaked for
    large k) the finite window [max(0, center - 40 width), center + 40 width]
    is integrated in pieces of 8 widths, and the two tails are added
    separately. epsabs is the absolute tolerance for the whole integral and
    is shared evenly among the pieces.

    Raises:
        QuadratureError: tolerance not reached within cfg.quad_max_subdiv
    """
    if center is None:
        value, _ = _checked_quad(func, 0.0, numpy.inf, cfg, epsabs=epsabs)
        return value
    width = max(width if width else 0.0, 1e-300)
    lower = max(0.0, center - 40.0 * width)
    upper = center + 40.0 * width
    edges = numpy.unique(numpy.clip(center + 8.0 * width * numpy.arange(-5, 6), lower, upper))
    pieces = [(0.0, lower)] if lower > 0.0 else []
    pieces += list(zip(edges[:-1], edges[1:]))
    pieces.append((upper, numpy.inf))
    share = epsabs / len(pieces)
    return math.fsum(_checked_quad(func, a, b, cfg, epsabs=share)[0] for a, b in pieces)
