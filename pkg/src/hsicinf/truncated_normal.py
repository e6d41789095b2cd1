"""Truncated normal CDF and the selective p-value built on it."""
from __future__ import annotations

import math

from scipy.special import log_ndtr, ndtr

from .errors import PrecisionError

# beyond this many standard deviations from the mean, CDF differences are
# formed in log space
TAIL = 6.0


def _interval_cdf(x: float, a: float, b: float) -> float:
    """CDF at standardized ``x`` of N(0, 1) truncated to ``[a, b]``."""
    if a >= TAIL:
        # upper tail: survival-function ratios relative to Q(a)
        la = log_ndtr(-a)
        num = -math.expm1(log_ndtr(-x) - la)
        den = -math.expm1(log_ndtr(-b) - la)
    elif b <= -TAIL:
        # lower tail: CDF ratios relative to Phi(b)
        lx = log_ndtr(x)
        lb = log_ndtr(b)
        la = log_ndtr(a)
        num = math.exp(lx - lb) * -math.expm1(la - lx)
        den = -math.expm1(la - lb)
    elif a > 0.0:
        qa = ndtr(-a)
        num = qa - ndtr(-x)
        den = qa - ndtr(-b)
    else:
        pa = ndtr(a)
        num = ndtr(x) - pa
        den = ndtr(b) - pa
    if not den > 0.0:
        raise PrecisionError(
            f"truncation interval [{a:.6g}, {b:.6g}] (standardized) has no representable mass"
        )
    return min(1.0, max(0.0, num / den))


def trunc_norm_cdf(x: float, mean: float, variance: float, lower: float, upper: float) -> float:
    """CDF of N(mean, variance) truncated to ``[lower, upper]`` at ``x``.

    Endpoints may be infinite. ``x`` must lie in the interval.
    """
    if not variance > 0.0 or not math.isfinite(variance):
        raise ValueError(f"variance must be positive and finite, got {variance}")
    if not lower < upper:
        raise ValueError(f"need lower < upper, got [{lower}, {upper}]")
    if not lower <= x <= upper:
        raise ValueError(f"x={x} outside [{lower}, {upper}]")
    if x == lower:
        return 0.0
    if x == upper:
        return 1.0
    sd = math.sqrt(variance)
    a = (lower - mean) / sd
    b = (upper - mean) / sd
    z = (x - mean) / sd
    return _interval_cdf(z, a, b)


def selective_p_value(score: float, variance: float, lower: float, upper: float) -> float:
    """One-sided p-value of a score under mean 0, truncated to ``[lower, upper]``.

    This is ``1 - F(score)``, evaluated as the CDF of the mirrored distribution
    to keep precision for small p-values. With ``lower=-inf, upper=inf`` it is
    the ordinary upper-tail normal p-value.
    """
    return trunc_norm_cdf(-score, 0.0, variance, -upper, -lower)
