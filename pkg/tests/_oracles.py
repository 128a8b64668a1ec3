"""Independent numerical references for the statistics tests.

Everything here is built from first principles with elementary tools: exact
binomial sums over ``math.comb``, Gauss-Legendre quadrature of the beta
density, the stdlib ``erf`` for the one-degree chi-square CDF, and bracketed
root finding.  None of the package's own numerics are used, so agreement is
evidence rather than tautology.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

# 200 nodes integrate polynomials up to degree 399 exactly, so the beta CDF
# below is exact (to rounding) for integer shape parameters a + b <= 401.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(200)


def binomial_pmf(k: int, n: int, p: float) -> float:
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def binomial_tail_ge(m: int, n: int, p: float) -> float:
    """P(X >= m) for X ~ Binomial(n, p)."""
    return math.fsum(binomial_pmf(k, n, p) for k in range(m, n + 1))


def binomial_tail_le(m: int, n: int, p: float) -> float:
    """P(X <= m) for X ~ Binomial(n, p)."""
    return math.fsum(binomial_pmf(k, n, p) for k in range(0, m + 1))


def cp_lower(m: int, n: int, alpha: float) -> float:
    """Lower exact binomial bound: the p with P(X >= m | p) = alpha/2."""
    if m == 0:
        return 0.0
    return brentq(lambda p: binomial_tail_ge(m, n, p) - alpha / 2.0,
                  1e-16, 1.0 - 1e-16, xtol=1e-14, rtol=8.9e-16)


def cp_upper(m: int, n: int, alpha: float) -> float:
    """Upper exact binomial bound: the p with P(X <= m | p) = alpha/2."""
    if m == n:
        return 1.0
    return brentq(lambda p: binomial_tail_le(m, n, p) - alpha / 2.0,
                  1e-16, 1.0 - 1e-16, xtol=1e-14, rtol=8.9e-16)


def beta_cdf(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta by direct quadrature of the density."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    t = 0.5 * x * (_GL_NODES + 1.0)
    log_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    density = np.exp((a - 1.0) * np.log(t) + (b - 1.0) * np.log1p(-t) - log_beta)
    return float(0.5 * x * np.dot(_GL_WEIGHTS, density))


def beta_quantile(q: float, a: float, b: float) -> float:
    if q == 0.0:
        return 0.0
    if q == 1.0:
        return 1.0
    return brentq(lambda x: beta_cdf(x, a, b) - q,
                  1e-16, 1.0 - 1e-16, xtol=1e-14, rtol=8.9e-16)


def chi2_cdf_1df(x: float) -> float:
    """P(Z^2 <= x) for standard normal Z, via the stdlib error function."""
    if x < 0.0:
        return 0.0
    return math.erf(math.sqrt(0.5 * x))


def chi2_quantile_1df(q: float) -> float:
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    return brentq(lambda x: chi2_cdf_1df(x) - q, 0.0, 400.0,
                  xtol=1e-13, rtol=8.9e-16)


def goodman_bounds(counts, alpha: float) -> list[tuple[float, float]]:
    """Simultaneous multinomial bounds recomputed from the defining formula."""
    counts = [int(c) for c in counts]
    n = sum(counts)
    k = len(counts)
    b = chi2_quantile_1df(1.0 - alpha / k)
    out = []
    for x in counts:
        half = math.sqrt(b * (b + 4.0 * x * (n - x) / n))
        lo = max(0.0, (b + 2.0 * x - half) / (2.0 * (n + b)))
        hi = min(1.0, (b + 2.0 * x + half) / (2.0 * (n + b)))
        out.append((lo, hi))
    return out


def erp_reference(proportions) -> float:
    """Equivalent reference probability recomputed with plain Python loops."""
    p = [float(v) for v in proportions]
    k = len(p)
    i_star = max(range(k), key=lambda i: p[i])
    p_star = p[i_star]
    if p_star >= 1.0:
        return 1.0
    cross = math.fsum(p[i] * math.log(p[i])
                      for i in range(k) if i != i_star and p[i] > 0.0)
    gain = math.log(p_star) - cross / (1.0 - p_star)
    return math.exp(gain) / (math.exp(gain) + k - 1)
