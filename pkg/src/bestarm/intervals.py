"""Wilson score interval and the standard normal quantile behind it."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

# Acklam's rational approximation to the inverse normal CDF (rel. error ~1e-9),
# polished below with one Halley step against math.erfc.
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


class WilsonInterval(NamedTuple):
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _lower_half_quantile(p: float) -> float:
    # p <= 0.5, so every intermediate stays accurate in relative terms
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        c, d = _C, _D
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    else:
        q = p - 0.5
        r = q * q
        a, b = _A, _B
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    err = 0.5 * math.erfc(-x / _SQRT2) - p
    u = err * _SQRT2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal CDF.

    Accurate to well under 1e-9 absolute on [1e-10, 1 - 1e-10]. The upper half is
    evaluated through symmetry so that tail probabilities never lose precision to
    cancellation against 1.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"normal_quantile needs 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -_lower_half_quantile(1.0 - p)
    return _lower_half_quantile(p)


def z_value(alpha: float) -> float:
    """Two-sided critical value z_{alpha/2}, i.e. the (1 - alpha/2) quantile."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return -normal_quantile(0.5 * alpha)


def _wilson_from_z(p_hat: float, n: int, z: float) -> WilsonInterval:
    shrink = z * z / n
    q_hat = 1.0 - p_hat
    half = math.sqrt(p_hat * q_hat * shrink + 0.25 * shrink * shrink)
    # (center -/+ half) / denom, rationalised: no cancellation near 0 or 1
    lower = p_hat * p_hat / (p_hat + 0.5 * shrink + half)
    upper = 1.0 - q_hat * q_hat / (q_hat + 0.5 * shrink + half)
    return WilsonInterval(min(lower, p_hat), max(upper, p_hat))


def wilson_interval(p_hat: float, n: int, alpha: float) -> WilsonInterval:
    """Wilson score interval at confidence level ``1 - alpha``.

    ``p_hat`` may be the mean of any rewards bounded in [0, 1], not only a
    Bernoulli success rate. With ``n == 0`` the interval is the whole unit range.
    """
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n!r}")
    z = z_value(alpha)
    if n == 0:
        return WilsonInterval(0.0, 1.0)
    return _wilson_from_z(float(p_hat), int(n), z)


def wilson_bounds(
    p_hat: np.ndarray,
    n: np.ndarray,
    z: np.ndarray | float,
    may_have_zeros: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Wilson bounds for arrays of means and counts.

    ``z`` broadcasts against ``p_hat`` (e.g. one critical value per bandit row).
    Entries with ``n == 0`` come back as (0, 1); callers that know every count is
    positive can pass ``may_have_zeros=False`` to skip that check.
    """
    p = np.asarray(p_hat, dtype=float)
    n = np.asarray(n)
    any_unpulled = may_have_zeros and bool((n == 0).any())
    if any_unpulled:
        unpulled = n == 0
        n = np.where(unpulled, 1, n)
    shrink = (np.asarray(z, dtype=float) ** 2) / n  # z^2 / n
    q = 1.0 - p
    spread = p * q
    spread *= shrink
    spread += 0.25 * shrink * shrink
    half = np.sqrt(spread)  # = z * sqrt(p(1-p)/n + z^2/4n^2) since z > 0
    half += 0.5 * shrink
    # rationalised bounds, see _wilson_from_z; exact 0 at p = 0 and exact 1 at p = 1
    lower = p * p
    lower /= p + half
    upper = q * q
    upper /= q + half
    np.subtract(1.0, upper, out=upper)
    np.minimum(lower, p, out=lower)
    np.maximum(upper, p, out=upper)
    if any_unpulled:
        lower[unpulled] = 0.0
        upper[unpulled] = 1.0
    return lower, upper
