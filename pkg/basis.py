# Jain basis functions
#   L_{n,k}(x) = nx (nx + k beta)^{k-1} e^{-(nx + k beta)} / k!
# and their inner products against powers of t.
import math
import logging
from dataclasses import dataclass

import numpy
from scipy import special

from numerics import (DEFAULT_CONFIG, DomainError, TruncationError, integrate_halfline,
                      log_hyp1f1_positive, log_pochhammer, tricomi_u_oracle)

logger = logging.getLogger(__name__)

BLOCK_SIZE = 512


@dataclass(frozen=True)
class JainParams:
    """Operator index n > 0 (any real) and shape parameter 0 <= beta < 1."""
    n: float
    beta: float

    def __post_init__(self):
        if not self.n > 0 or not math.isfinite(self.n):
            raise DomainError("Invalid n {}".format(self.n))
        elif not 0 <= self.beta < 1:
            raise DomainError("Invalid beta {}".format(self.beta))

    @property
    def case(self):
        return "n={}, beta={}".format(self.n, self.beta)


def log_jain_basis(p, ks, x):
    """log L_{n,k}(x) for an array of k at a fixed x > 0."""
    ks = numpy.asarray(ks, dtype=float)
    nx = p.n * x
    shifted = nx + ks * p.beta
    return (math.log(nx) + (ks - 1.0) * numpy.log(shifted) - shifted
            - special.gammaln(ks + 1.0))


def jain_basis(p, k, x):
    """Value of L_{n,k}(x), x >= 0, k >= 0.

    At x = 0 the basis is taken by continuity: L_{n,0}(0) = 1 and
    L_{n,k}(0) = 0 for k >= 1.
    """
    if k < 0 or int(k) != k:
        raise DomainError("Invalid basis index {}".format(k))
    elif x < 0:
        raise DomainError("Invalid x {}".format(x))
    if x == 0:
        return 1.0 if k == 0 else 0.0
    if k == 0:
        return math.exp(-p.n * x)
    return float(numpy.exp(log_jain_basis(p, [k], x))[0])


def basis_weights(p, x, cfg=DEFAULT_CONFIG, safety=1):
    """Basis values L_{n,0}(x), ..., L_{n,K}(x) up to the truncation index K.

    K is the first index where the term is below cfg.tail_tol and the running
    mass exceeds 1 - cfg.tail_tol. With safety > 1 the array is extended to
    safety*(K+1) terms (capped at k_max) for integrands that grow in k.

    Raises:
        TruncationError: criterion not met by cfg.k_max
    """
    if x < 0:
        raise DomainError("Invalid x {}".format(x))
    if x == 0:
        return numpy.array([1.0])
    blocks = []
    total = 0.0
    start = 0
    stop = None
    while start <= cfg.k_max:
        ks = numpy.arange(start, min(start + BLOCK_SIZE, cfg.k_max + 1))
        terms = numpy.exp(log_jain_basis(p, ks, x))
        running = total + numpy.cumsum(terms)
        done = (terms < cfg.tail_tol) & (running > 1.0 - cfg.tail_tol)
        if done.any():
            stop = start + int(numpy.argmax(done))
            blocks.append(terms[:stop - start + 1])
            break
        blocks.append(terms)
        total = running[-1]
        start += BLOCK_SIZE
    if stop is None:
        raise TruncationError("basis mass {} short of 1 within tail_tol {} at k_max {} ({}, x={})"
                              .format(total, cfg.tail_tol, cfg.k_max, p.case, x))
    weights = numpy.concatenate(blocks)
    if safety > 1:
        extended = min(int(safety * len(weights)), cfg.k_max + 1)
        if extended > len(weights):
            ks = numpy.arange(len(weights), extended)
            weights = numpy.concatenate((weights, numpy.exp(log_jain_basis(p, ks, x))))
    logger.debug("truncation index, {}, x, {}".format(len(weights) - 1, x),
                 extra={'case': p.case})
    return weights


def basis_partial_sum(p, x, cfg=DEFAULT_CONFIG):
    """Truncated sum of the basis at x, returned with the truncation index used."""
    weights = basis_weights(p, x, cfg)
    return float(math.fsum(weights)), len(weights) - 1


def log_basis_moment_integral(p, k, r):
    if k < 1 or int(k) != k:
        raise DomainError("Invalid basis index {} for inner product".format(k))
    elif r < 0 or int(r) != r:
        raise DomainError("Invalid moment order {}".format(r))
    k, r = int(k), int(r)
    z = (k - 1) * p.beta
    return (log_pochhammer(k, r) - (r + 1) * math.log(p.n) - z
            + log_hyp1f1_positive(2 - k, 1 - r - k, z))


def basis_moment_integral(p, k, r):
    """<L_{n,k-1}, t^r> = (k)_r / n^{r+1} e^{-(k-1) beta} 1F1(2-k; 1-r-k; (k-1) beta).

    The 1F1 is a polynomial of degree k-2 in (k-1) beta with positive terms,
    evaluated in log space.
    """
    return math.exp(log_basis_moment_integral(p, k, r))


def basis_moment_ratio(p, k, r):
    """<L_{n,k-1}, t^r> / <L_{n,k-1}, 1>."""
    return math.exp(log_basis_moment_integral(p, k, r) - log_basis_moment_integral(p, k, 0))


def basis_moment_integral_tricomi(p, k, r, cfg=DEFAULT_CONFIG):
    """Same inner product through Tricomi's U,

    Gamma(r+2) c^{k+r} e^{-c} U(r+2, k+r+1, c) / (Gamma(k) n^{r+1}),  c = (k-1) beta,

    with U from its integral representation. Needs k >= 2 and beta > 0.
    """
    if k < 2 or not p.beta > 0:
        raise DomainError("U route needs k >= 2 and beta > 0, got k={} ({})".format(k, p.case))
    c = (k - 1) * p.beta
    u_value = tricomi_u_oracle(r + 2, k + r + 1, c, cfg)
    log_prefactor = (special.gammaln(r + 2) + (k + r) * math.log(c) - c
                     - special.gammaln(k) - (r + 1) * math.log(p.n))
    return math.exp(log_prefactor) * u_value


def basis_window(p, k):
    """Center and width of L_{n,k-1}(t) as a density in t."""
    mean = basis_moment_ratio(p, k, 1)
    variance = basis_moment_ratio(p, k, 2) - mean ** 2
    width = max(math.sqrt(max(variance, 0.0)), 1.0 / p.n)
    return mean, width


def basis_inner_product(p, k, func, cfg=DEFAULT_CONFIG, sup_norm=None):
    """Quadrature value of <L_{n,k-1}, func> over [0, inf).

    With sup_norm, a bound on |func|, the absolute tolerance is
    quad_rel_tol * sup_norm * <L_{n,k-1}, 1>; without it only the relative
    tolerance applies.
    """
    center, width = basis_window(p, k)
    epsabs = cfg.quad_rel_tol * sup_norm * basis_moment_integral(p, k, 0) if sup_norm else 0.0

    def integrand(t):
        if t <= 0.0:
            return func(0.0) if k == 1 else 0.0
        return jain_basis(p, k - 1, t) * func(t)

    return integrate_halfline(integrand, cfg, center=center, width=width, epsabs=epsabs)


def basis_moment_quadrature(p, k, r, cfg=DEFAULT_CONFIG):
    return basis_inner_product(p, k, lambda t: t ** r, cfg)
