# Exact polynomial arithmetic over the rationals in the symbols
#   main  (k for the P-polynomials, x for moments),
#   beta,
#   ninv  (1/n),
# with a shared denominator (1 - beta)^m.
#
# Values are immutable once built, so they can be shared across threads and
# cached freely.
import math
import logging
from fractions import Fraction
from numbers import Rational

from numerics import DomainError

logger = logging.getLogger(__name__)

SYMBOLS = ('main', 'beta', 'ninv')


def _as_fraction(value):
    if isinstance(value, Rational):
        return Fraction(value)
    raise TypeError("ExactPoly coefficients must be rational, got {!r}".format(value))


def _strip_zeros(terms):
    return {key: coef for key, coef in terms.items() if coef != 0}


def _times_one_minus_beta(terms, power):
    """Multiply a term map by (1 - beta)^power."""
    for _ in range(power):
        product = {}
        for (i, j, l), coef in terms.items():
            product[(i, j, l)] = product.get((i, j, l), 0) + coef
            product[(i, j + 1, l)] = product.get((i, j + 1, l), 0) - coef
        terms = _strip_zeros(product)
    return terms


def _divide_one_minus_beta(terms):
    """Return terms / (1 - beta) when the division is exact, else None.

    Each (main, ninv) slice is a polynomial in beta; it is divisible by
    (1 - beta) iff it vanishes at beta = 1. Synthetic division by (beta - 1)
    then a sign flip gives the quotient.
    """
    slices = {}
    for (i, j, l), coef in terms.items():
        slices.setdefault((i, l), {})[j] = coef
    quotient = {}
    for (i, l), by_power in slices.items():
        if sum(by_power.values()) != 0:
            return None
        degree = max(by_power)
        carry = Fraction(0)
        for j in range(degree, 0, -1):
            carry = by_power.get(j, 0) + carry
            if carry != 0:
                quotient[(i, j - 1, l)] = -carry
    return quotient


class ExactPoly:
    """Polynomial in (main, beta, ninv) over Q divided by (1 - beta)^denom_pow.

    Stored in canonical form: no zero coefficients and denom_pow minimal,
    so two values are equal iff their term maps and denom_pow agree.
    The ninv exponent may be negative (multiplication by n keeps the type
    closed); main and beta exponents are nonnegative.
    """
    __slots__ = ('_terms', '_denom_pow', '_hash')

    def __init__(self, terms=None, denom_pow=0):
        if denom_pow < 0 or int(denom_pow) != denom_pow:
            raise DomainError("Invalid denom_pow {}".format(denom_pow))
        clean = {}
        for key, coef in (terms or {}).items():
            i, j, l = key
            if i < 0 or j < 0:
                raise DomainError("Negative main/beta exponent in {}".format(key))
            clean[(int(i), int(j), int(l))] = _as_fraction(coef)
        clean = _strip_zeros(clean)
        denom_pow = int(denom_pow)
        while denom_pow > 0 and clean:
            reduced = _divide_one_minus_beta(clean)
            if reduced is None:
                break
            clean = reduced
            denom_pow -= 1
        if not clean:
            denom_pow = 0
        self._terms = clean
        self._denom_pow = denom_pow
        self._hash = None

    # constructors
    @classmethod
    def constant(cls, value):
        return cls({(0, 0, 0): value})

    @classmethod
    def monomial(cls, coef=1, main=0, beta=0, ninv=0, denom_pow=0):
        return cls({(main, beta, ninv): coef}, denom_pow)

    @classmethod
    def beta_poly(cls, coefficients, denom_pow=0):
        """Polynomial in beta from the coefficient list [c0, c1, ...]."""
        return cls({(0, j, 0): c for j, c in enumerate(coefficients)}, denom_pow)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, ExactPoly):
            return value
        return cls.constant(value)

    # accessors
    @property
    def terms(self):
        return dict(self._terms)

    @property
    def denom_pow(self):
        return self._denom_pow

    def is_zero(self):
        return not self._terms

    def degree(self, symbol='main'):
        index = SYMBOLS.index(symbol)
        if not self._terms:
            return -1
        return max(key[index] for key in self._terms)

    def min_degree(self, symbol='ninv'):
        index = SYMBOLS.index(symbol)
        if not self._terms:
            return 0
        return min(key[index] for key in self._terms)

    def coefficient(self, main_degree):
        """Coefficient of main^main_degree, as an ExactPoly free of main."""
        return ExactPoly({(0, j, l): c for (i, j, l), c in self._terms.items()
                          if i == main_degree}, self._denom_pow)

    def ninv_coefficient(self, ninv_degree):
        return ExactPoly({(i, j, 0): c for (i, j, l), c in self._terms.items()
                          if l == ninv_degree}, self._denom_pow)

    def leading_coefficient(self):
        return self.coefficient(self.degree('main'))

    # arithmetic
    def _aligned(self, other):
        other = ExactPoly.coerce(other)
        common = max(self._denom_pow, other._denom_pow)
        left = _times_one_minus_beta(self._terms, common - self._denom_pow)
        right = _times_one_minus_beta(other._terms, common - other._denom_pow)
        return left, right, common

    def __add__(self, other):
        try:
            left, right, common = self._aligned(other)
        except TypeError:
            return NotImplemented
        left = dict(left)
        for key, coef in right.items():
            left[key] = left.get(key, 0) + coef
        return ExactPoly(left, common)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly({k: -c for k, c in self._terms.items()}, self._denom_pow)

    def __sub__(self, other):
        try:
            return self + (-ExactPoly.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return ExactPoly.coerce(other) - self

    def __mul__(self, other):
        try:
            other = ExactPoly.coerce(other)
        except TypeError:
            return NotImplemented
        product = {}
        for (i1, j1, l1), c1 in self._terms.items():
            for (i2, j2, l2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2, l1 + l2)
                product[key] = product.get(key, 0) + c1 * c2
        return ExactPoly(product, self._denom_pow + other._denom_pow)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero rational only."""
        if isinstance(other, Rational) and other != 0:
            return ExactPoly({k: c / Fraction(other) for k, c in self._terms.items()},
                             self._denom_pow)
        return NotImplemented

    def __pow__(self, exponent):
        if int(exponent) != exponent or exponent < 0:
            return NotImplemented
        result = ExactPoly.constant(1)
        for _ in range(int(exponent)):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Rational):
            other = ExactPoly.constant(other)
        if not isinstance(other, ExactPoly):
            return NotImplemented
        return self._denom_pow == other._denom_pow and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._denom_pow, frozenset(self._terms.items())))
        return self._hash

    def exact_div_beta(self, power):
        """Divide the numerator by beta^power; DomainError if not exact."""
        if any(j < power for (_, j, _) in self._terms):
            raise DomainError("numerator not divisible by beta^{}".format(power))
        return ExactPoly({(i, j - power, l): c for (i, j, l), c in self._terms.items()},
                         self._denom_pow)

    def times_n(self, power=1):
        return ExactPoly({(i, j, l - power): c for (i, j, l), c in self._terms.items()},
                         self._denom_pow)

    # calculus
    def derivative(self, symbol='main'):
        """Exact partial derivative with respect to main or beta."""
        if symbol == 'main':
            return ExactPoly({(i - 1, j, l): c * i for (i, j, l), c in self._terms.items()
                              if i > 0}, self._denom_pow)
        elif symbol == 'beta':
            # d/dbeta [N (1-beta)^-m] = [N' (1-beta) + m N] (1-beta)^-(m+1)
            numerator = ExactPoly(self._terms)
            d_numerator = ExactPoly({(i, j - 1, l): c * j for (i, j, l), c in self._terms.items()
                                     if j > 0})
            one_minus_beta = ExactPoly.beta_poly([1, -1])
            combined = d_numerator * one_minus_beta + numerator * self._denom_pow
            return ExactPoly(combined._terms, self._denom_pow + 1)
        raise DomainError("derivative only with respect to main or beta, got {}".format(symbol))

    # evaluation
    def evaluate(self, main, beta, n):
        """Value at a point; exact when every argument is rational."""
        if self._denom_pow > 0 and beta == 1:
            raise DomainError("ExactPoly with (1-beta)^{} denominator evaluated at beta=1"
                              .format(self._denom_pow))
        ninv = Fraction(1) / n if isinstance(n, Rational) else 1.0 / n
        total = 0
        for (i, j, l), coef in self._terms.items():
            ninv_power = ninv ** l if l >= 0 else n ** (-l)
            total += coef * main ** i * beta ** j * ninv_power
        return total / (1 - beta) ** self._denom_pow

    # text forms
    def serialize(self):
        """Canonical text: header then one 'main beta ninv coefficient' line per term."""
        lines = ["denom_pow {}".format(self._denom_pow), "main beta ninv coefficient"]
        for key in sorted(self._terms):
            coef = self._terms[key]
            text = str(coef.numerator) if coef.denominator == 1 else \
                "{}/{}".format(coef.numerator, coef.denominator)
            lines.append("{} {} {} {}".format(key[0], key[1], key[2], text))
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text):
        lines = [line for line in text.strip().splitlines() if line.strip()]
        denom_pow = int(lines[0].split()[1])
        terms = {}
        for line in lines[2:]:
            i, j, l, coef = line.split()
            terms[(int(i), int(j), int(l))] = Fraction(coef)
        return cls(terms, denom_pow)

    def to_text(self, main_name='x'):
        if not self._terms:
            return "0"
        parts = []
        for (i, j, l), coef in sorted(self._terms.items(), reverse=True):
            factors = [str(coef)] if coef != 1 or (i, j, l) == (0, 0, 0) else []
            for name, power in ((main_name, i), ('beta', j), ('n', -l)):
                if power == 1:
                    factors.append(name)
                elif power != 0:
                    factors.append("{}^{}".format(name, power))
            parts.append("*".join(factors))
        numerator = " + ".join(parts).replace("+ -", "- ")
        if self._denom_pow == 0:
            return numerator
        return "({})/(1-beta)^{}".format(numerator, self._denom_pow)

    def __repr__(self):
        return "ExactPoly({})".format(self.to_text())


MAIN = ExactPoly.monomial(main=1)
BETA = ExactPoly.monomial(beta=1)
NINV = ExactPoly.monomial(ninv=1)
ONE = ExactPoly.constant(1)
ZERO = ExactPoly()
ONE_MINUS_BETA = ExactPoly.beta_poly([1, -1])
INV_ONE_MINUS_BETA = ExactPoly.monomial(denom_pow=1)


def poly_add(a, b):
    return ExactPoly.coerce(a) + b


def poly_sub(a, b):
    return ExactPoly.coerce(a) - b


def poly_mul(a, b):
    return ExactPoly.coerce(a) * b


def poly_eval(p, main, beta, n):
    return float(p.evaluate(main, beta, n))


def binomial(r, j):
    return math.comb(r, j)


class ExpPoly:
    """Expression poly_part(x) + exp_coeff(x) * e^{-n x}.

    exp_coeff is constant in x for the moments T_{n,r}; central moments carry
    an x-dependent coefficient F_{n,r}(x).
    """
    __slots__ = ('poly_part', 'exp_coeff')

    def __init__(self, poly_part, exp_coeff=None):
        object.__setattr__(self, 'poly_part', ExactPoly.coerce(poly_part))
        object.__setattr__(self, 'exp_coeff',
                           ExactPoly.coerce(exp_coeff) if exp_coeff is not None else ZERO)

    def __setattr__(self, name, value):
        raise AttributeError("ExpPoly is immutable")

    @classmethod
    def one_minus_exp(cls, coefficient):
        """coefficient * (1 - e^{-n x})."""
        coefficient = ExactPoly.coerce(coefficient)
        return cls(coefficient, -coefficient)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, ExpPoly):
            return value
        return cls(value)

    def __add__(self, other):
        other = ExpPoly.coerce(other)
        return ExpPoly(self.poly_part + other.poly_part, self.exp_coeff + other.exp_coeff)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly(-self.poly_part, -self.exp_coeff)

    def __sub__(self, other):
        return self + (-ExpPoly.coerce(other))

    def __rsub__(self, other):
        return ExpPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            if not other.exp_coeff.is_zero() and not self.exp_coeff.is_zero():
                raise DomainError("product of two exponential parts leaves the ExpPoly form")
            if self.exp_coeff.is_zero():
                return other * self.poly_part
            other = other.poly_part
        other = ExactPoly.coerce(other)
        return ExpPoly(self.poly_part * other, self.exp_coeff * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.coerce(other)
        return self.poly_part == other.poly_part and self.exp_coeff == other.exp_coeff

    def __hash__(self):
        return hash((self.poly_part, self.exp_coeff))

    def times_n(self, power=1):
        return ExpPoly(self.poly_part.times_n(power), self.exp_coeff.times_n(power))

    def derivative(self):
        """d/dx, with D(q e^{-nx}) = (q' - n q) e^{-nx}."""
        return ExpPoly(self.poly_part.derivative('main'),
                       self.exp_coeff.derivative('main') - self.exp_coeff.times_n(1))

    def evaluate(self, x, beta, n):
        value = float(self.poly_part.evaluate(x, beta, n))
        if not self.exp_coeff.is_zero():
            value += float(self.exp_coeff.evaluate(x, beta, n)) * math.exp(-n * x)
        return value

    def limit_large_n(self):
        """lim_{n -> inf} of the expression at fixed x > 0.

        The exponential part vanishes; the polynomial part must not contain
        positive powers of n.
        """
        if self.poly_part.min_degree('ninv') < 0:
            raise DomainError("expression diverges as n -> infinity")
        return self.poly_part.ninv_coefficient(0)

    def serialize(self):
        return "poly_part\n{}exp_coeff\n{}".format(self.poly_part.serialize(),
                                                   self.exp_coeff.serialize())

    @classmethod
    def deserialize(cls, text):
        head, tail = text.split("exp_coeff\n")
        return cls(ExactPoly.deserialize(head.replace("poly_part\n", "", 1)),
                   ExactPoly.deserialize(tail))

    def to_text(self):
        if self.exp_coeff.is_zero():
            return self.poly_part.to_text()
        return "{} + [{}]*exp(-n*x)".format(self.poly_part.to_text(), self.exp_coeff.to_text())

    def __repr__(self):
        return "ExpPoly({})".format(self.to_text())
