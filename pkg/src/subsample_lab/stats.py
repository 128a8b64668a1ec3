"""Small-sample confidence intervals for class proportions.

Quantile functions are implemented here rather than imported so that the
interval construction is self-contained and testable against independent
oracles: the regularized incomplete beta function is evaluated by continued
fraction and inverted with a safeguarded Newton iteration, and the chi-square
quantile (one degree of freedom) is the squared normal quantile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "ConfidenceInterval",
    "regularized_incomplete_beta",
    "beta_quantile",
    "chi_square_quantile",
    "clopper_pearson",
    "goodman_intervals",
]

_CF_MAX_ITER = 500
_CF_EPS = 1e-16
_TINY = 1e-300


@dataclass(frozen=True)
class ConfidenceInterval:
    """Two-sided interval for a proportion, with nominal level ``1 - alpha``."""

    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(
                f"invalid interval [{self.lower}, {self.upper}]"
            )

    def contains(self, p: float) -> bool:
        return self.lower <= p <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta function, evaluated with
    # Lentz's method.  Converges quickly for x < (a + 1) / (a + b + 2).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + num / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + num / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction failed to converge (a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    Parameters
    ----------
    a, b : float
        Positive shape parameters.
    x : float
        Evaluation point in ``[0, 1]``.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def beta_quantile(p: float, a: float, b: float) -> float:
    """Inverse of ``I_x(a, b)``: the x with ``I_x(a, b) = p``.

    Newton steps on the beta CDF, safeguarded by an always-shrinking
    bisection bracket; absolute accuracy is well below 1e-10.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0

    ln_beta = _log_beta(a, b)
    lo, hi = 0.0, 1.0
    x = a / (a + b)
    for _ in range(200):
        f = regularized_incomplete_beta(a, b, x) - p
        if f == 0.0:
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        if hi - lo < 1e-15:
            break
        # Newton step from the density; bisect when it leaves the bracket.
        ln_pdf = (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - ln_beta
        step = f * math.exp(-ln_pdf) if ln_pdf > -700.0 else math.inf
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < 1e-16:
            return x_new
        x = x_new
    return 0.5 * (lo + hi)


# Coefficients of Acklam's rational approximation to the normal quantile.
_PPF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_PPF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_PPF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_PPF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)


def _normal_quantile(p: float) -> float:
    # Acklam's approximation (~1e-9 relative) plus one Halley refinement
    # against erfc, which brings the result to near machine precision.
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_PPF_C[0] * q + _PPF_C[1]) * q + _PPF_C[2]) * q + _PPF_C[3]) * q
               + _PPF_C[4]) * q + _PPF_C[5])
             / ((((_PPF_D[0] * q + _PPF_D[1]) * q + _PPF_D[2]) * q + _PPF_D[3]) * q + 1.0))
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = ((((((_PPF_A[0] * r + _PPF_A[1]) * r + _PPF_A[2]) * r + _PPF_A[3]) * r
               + _PPF_A[4]) * r + _PPF_A[5]) * q
             / (((((_PPF_B[0] * r + _PPF_B[1]) * r + _PPF_B[2]) * r + _PPF_B[3]) * r
                 + _PPF_B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -((((((_PPF_C[0] * q + _PPF_C[1]) * q + _PPF_C[2]) * q + _PPF_C[3]) * q
                + _PPF_C[4]) * q + _PPF_C[5])
              / ((((_PPF_D[0] * q + _PPF_D[1]) * q + _PPF_D[2]) * q + _PPF_D[3]) * q + 1.0))
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@lru_cache(maxsize=4096)
def chi_square_quantile(p: float, df: int = 1) -> float:
    """Quantile of the chi-square distribution with one degree of freedom.

    For ``df = 1`` the quantile is the square of the standard normal quantile
    at ``(1 + p) / 2``.  Other degrees of freedom are not needed here.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if df != 1:
        raise ValueError(f"only df=1 is supported, got df={df}")
    z = _normal_quantile(0.5 * (1.0 + p))
    return z * z


@lru_cache(maxsize=65536)
def clopper_pearson(m: int, n: int, alpha: float) -> ConfidenceInterval:
    """Exact binomial confidence interval for ``m`` successes in ``n`` trials.

    The standard construction from beta quantiles: the lower bound solves
    ``P(X >= m | p) = alpha/2`` and the upper bound ``P(X <= m | p) = alpha/2``,
    with the boundary cases ``m = 0`` and ``m = n`` pinned to 0 and 1.
    """
    if n <= 0:
        raise ValueError(f"need at least one trial, got n={n}")
    if not 0 <= m <= n:
        raise ValueError(f"m must be in [0, n], got m={m}, n={n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    lower = 0.0 if m == 0 else beta_quantile(alpha / 2.0, m, n - m + 1)
    upper = 1.0 if m == n else beta_quantile(1.0 - alpha / 2.0, m + 1, n - m)
    return ConfidenceInterval(lower, upper, 1.0 - alpha)


def goodman_intervals(counts, alpha: float) -> list[ConfidenceInterval]:
    """Simultaneous confidence intervals for multinomial class proportions.

    For class count ``x`` out of ``n`` total, the bounds are

        (b + 2x +- sqrt(b * (b + 4x(n - x)/n))) / (2(n + b))

    where ``b`` is the chi-square(1) quantile at ``1 - alpha/k`` and ``k`` the
    number of classes.  The division of alpha across classes is what makes the
    k intervals hold jointly.
    """
    counts = [int(c) for c in counts]
    k = len(counts)
    if k < 2:
        raise ValueError(f"need at least two classes, got {k}")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    n = sum(counts)
    if n < 1:
        raise ValueError("need at least one observation")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    b = chi_square_quantile(1.0 - alpha / k, 1)
    level = 1.0 - alpha
    intervals = []
    for x in counts:
        half = math.sqrt(b * (b + 4.0 * x * (n - x) / n))
        denom = 2.0 * (n + b)
        lower = max(0.0, (b + 2.0 * x - half) / denom)
        upper = min(1.0, (b + 2.0 * x + half) / denom)
        intervals.append(ConfidenceInterval(lower, upper, level))
    return intervals
