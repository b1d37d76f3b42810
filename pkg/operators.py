# Numerical application of the Jain operator B_n and the Phillips-type
# operator P_n to test functions.
import math
import logging
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy
from numpy.polynomial import polynomial

from basis import basis_inner_product, basis_moment_integral, basis_moment_ratio, basis_weights
from moment_engine import p_poly_recur
from numerics import DEFAULT_CONFIG, DomainError
from symbolic import binomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestFunction:
    """A function on [0, inf) the operators act on.

    Args:
        label (str): identifier used in logs and reports
        eval (callable): t -> f(t)
        is_bounded (bool): sup |f| finite on [0, inf)
        sup_norm_hint (float): a bound on |f| when is_bounded
        poly_coeffs (tuple): c_0, ..., c_d when f is the polynomial sum c_j t^j
        fp, fpp (callable): first and second derivative when known
    """
    __test__ = False

    label: str
    eval: Callable[[float], float]
    is_bounded: bool
    sup_norm_hint: Optional[float] = None
    poly_coeffs: Optional[Tuple] = None
    fp: Optional[Callable[[float], float]] = None
    fpp: Optional[Callable[[float], float]] = None

    def __call__(self, t):
        return self.eval(t)

    @property
    def grows(self):
        return not self.is_bounded


def polynomial_function(coeffs, label=None):
    """TestFunction for sum_j coeffs[j] t^j."""
    coeffs = tuple(coeffs)
    if not coeffs:
        raise DomainError("empty polynomial")
    d1 = tuple(j * c for j, c in enumerate(coeffs))[1:] or (0,)
    d2 = tuple(j * c for j, c in enumerate(d1))[1:] or (0,)
    bounded = all(c == 0 for c in coeffs[1:])
    return TestFunction(label=label or "poly{}".format(coeffs),
                        eval=lambda t: float(polynomial.polyval(t, coeffs)),
                        is_bounded=bounded,
                        sup_norm_hint=abs(coeffs[0]) if bounded else None,
                        poly_coeffs=coeffs,
                        fp=lambda t: float(polynomial.polyval(t, d1)),
                        fpp=lambda t: float(polynomial.polyval(t, d2)))


def shifted_power(x, r):
    """(t - x)^r."""
    return polynomial_function([binomial(r, j) * (-x) ** (r - j) for j in range(r + 1)],
                               label="(t-{})^{}".format(x, r))


def linear_combination(alpha, f, g):
    """alpha f + g."""
    if f.poly_coeffs is not None and g.poly_coeffs is not None:
        size = max(len(f.poly_coeffs), len(g.poly_coeffs))
        fc = f.poly_coeffs + (0,) * (size - len(f.poly_coeffs))
        gc = g.poly_coeffs + (0,) * (size - len(g.poly_coeffs))
        return polynomial_function([alpha * a + b for a, b in zip(fc, gc)],
                                   label="{}*{}+{}".format(alpha, f.label, g.label))
    bounded = f.is_bounded and g.is_bounded
    hint = None
    if bounded and f.sup_norm_hint is not None and g.sup_norm_hint is not None:
        hint = abs(alpha) * f.sup_norm_hint + g.sup_norm_hint
    return TestFunction(label="{}*{}+{}".format(alpha, f.label, g.label),
                        eval=lambda t: alpha * f(t) + g(t), is_bounded=bounded,
                        sup_norm_hint=hint)


def _abs_sin(t):
    return abs(math.sin(t))


BUILTIN_FUNCTIONS = {
    'const': polynomial_function([1], 'const'),
    'linear': polynomial_function([0, 1], 'linear'),
    'square': polynomial_function([0, 0, 1], 'square'),
    'cube': polynomial_function([0, 0, 0, 1], 'cube'),
    'exp-neg': TestFunction(label='exp-neg', eval=lambda t: math.exp(-t), is_bounded=True,
                            sup_norm_hint=1.0, fp=lambda t: -math.exp(-t),
                            fpp=lambda t: math.exp(-t)),
    'sin': TestFunction(label='sin', eval=math.sin, is_bounded=True, sup_norm_hint=1.0,
                        fp=math.cos, fpp=lambda t: -math.sin(t)),
    'abs-sin': TestFunction(label='abs-sin', eval=_abs_sin, is_bounded=True, sup_norm_hint=1.0),
}


def builtin_function(name):
    try:
        return BUILTIN_FUNCTIONS[name]
    except KeyError:
        raise DomainError("Invalid function name {}, choose from {}"
                          .format(name, sorted(BUILTIN_FUNCTIONS))) from None


def _safety(f):
    return 2 if f.grows else 1


def apply_jain(p, f, x, cfg=DEFAULT_CONFIG):
    """B_n(f, x) = sum_k L_{n,k}(x) f(k/n), truncated by the basis mass criterion."""
    weights = basis_weights(p, x, cfg, safety=_safety(f))
    nodes = numpy.arange(len(weights)) / p.n
    values = numpy.fromiter((f(t) for t in nodes), dtype=float, count=len(nodes))
    return math.fsum(weights * values)


class InnerProductCache:
    """<L_{n,k-1}, f> by quadrature, memoised on (f, n, beta, k, cfg).

    The key holds the TestFunction itself, so two functions sharing a label
    never share entries. Once max_entries values are held the cache is
    emptied before the next write. Reads are lock-free; writes take the lock.
    """

    def __init__(self, max_entries=200000):
        self.max_entries = max_entries
        self._values = {}
        self._lock = threading.Lock()

    def get(self, p, k, f, cfg):
        key = (f, p.n, p.beta, k, cfg)
        value = self._values.get(key)
        if value is None:
            value = basis_inner_product(p, k, f, cfg, sup_norm=f.sup_norm_hint)
            with self._lock:
                if len(self._values) >= self.max_entries:
                    logger.debug("inner product cache full at {} entries, cleared"
                                 .format(len(self._values)), extra={'case': p.case})
                    self._values.clear()
                value = self._values.setdefault(key, value)
        return value

    def clear(self):
        with self._lock:
            self._values.clear()

    def __len__(self):
        return len(self._values)


INNER_PRODUCTS = InnerProductCache()


def _polynomial_ratios(p, coeffs, ks):
    return numpy.array([sum(c * basis_moment_ratio(p, k, j) for j, c in enumerate(coeffs) if c)
                        for k in ks], dtype=float)


def phillips_ratios(p, f, ks, cfg=DEFAULT_CONFIG):
    """<L_{n,k-1}, f> / <L_{n,k-1}, 1> for each k in ks."""
    if f.poly_coeffs is not None:
        return _polynomial_ratios(p, f.poly_coeffs, ks)
    return numpy.array([INNER_PRODUCTS.get(p, k, f, cfg) / basis_moment_integral(p, k, 0)
                        for k in ks], dtype=float)


def apply_phillips(p, f, x, cfg=DEFAULT_CONFIG):
    """P_n(f, x) = sum_{k>=1} <L_{n,k-1}, f>/<L_{n,k-1}, 1> L_{n,k}(x) + e^{-nx} f(0).

    Polynomial f goes through the closed inner products, anything else
    through quadrature.
    """
    weights = basis_weights(p, x, cfg, safety=_safety(f))
    ks = numpy.arange(1, len(weights))
    series = math.fsum(weights[1:] * phillips_ratios(p, f, ks, cfg)) if len(ks) else 0.0
    value = series + math.exp(-p.n * x) * f(0.0)
    logger.debug("P_n({}, {}), {}, terms, {}".format(f.label, x, value, len(weights)),
                 extra={'case': p.case})
    return value


def _p_poly_coefficients(p, r):
    """Float coefficients in k of the polynomial P_r at (beta, n)."""
    poly = p_poly_recur(r)
    return [float(poly.coefficient(s).evaluate(0, p.beta, p.n))
            for s in range(poly.degree('main') + 1)]


def t_moment_series(p, r, x, cfg=DEFAULT_CONFIG):
    """sum_{k>=1} P_r(k) L_{n,k}(x) (+ e^{-nx} for r = 0) with the polynomial P_r."""
    weights = basis_weights(p, x, cfg, safety=2)
    ks = numpy.arange(1, len(weights), dtype=float)
    values = polynomial.polyval(ks, _p_poly_coefficients(p, r))
    series = math.fsum(weights[1:] * values) if len(ks) else 0.0
    if r == 0:
        series += math.exp(-p.n * x)
    return series


def central_moment_series(p, r, x, cfg=DEFAULT_CONFIG, kernel='operator'):
    """P_n((t-x)^r, x) expanded binomially over the inner-product ratios.

    kernel='operator' uses the true ratios <L_{n,k-1}, t^j>/<L_{n,k-1}, 1>;
    kernel='polynomial' uses the polynomials P_j(k), which is the sum the
    closed moment formulas describe.
    """
    if kernel not in ('operator', 'polynomial'):
        raise DomainError("Invalid kernel {}".format(kernel))
    weights = basis_weights(p, x, cfg, safety=2)
    ks = numpy.arange(1, len(weights))
    values = numpy.zeros(len(ks))
    for j in range(r + 1):
        scale = binomial(r, j) * (-x) ** (r - j)
        if kernel == 'polynomial':
            values += scale * polynomial.polyval(ks.astype(float), _p_poly_coefficients(p, j))
        else:
            values += scale * numpy.array([basis_moment_ratio(p, k, j) for k in ks])
    series = math.fsum(weights[1:] * values) if len(ks) else 0.0
    return series + math.exp(-p.n * x) * (-x) ** r
