"""Independent reference implementations used by the tests.

Everything here is written from the textbook formulas with mpmath or plain
Python, without importing the package's own numerics.
"""

from __future__ import annotations

import math

import mpmath as mp
from scipy.special import ndtri

mp.mp.dps = 30


def mp_quantile(p: float) -> mp.mpf:
    """Standard normal quantile to ~30 digits.

    Starts from scipy's double-precision ``ndtri`` and takes two Newton steps on
    the mpmath normal CDF, which is several times faster than ``mp.erfinv``.
    """
    # solve on the smaller tail so the residual does not cancel near 1
    tail = mp.mpf(p) if p <= 0.5 else 1 - mp.mpf(p)
    x = mp.mpf(float(ndtri(min(p, 1.0 - p))))
    for _ in range(2):
        x -= (mp.erfc(-x / mp.sqrt(2)) / 2 - tail) / mp.npdf(x)
    return x if p <= 0.5 else -x


def quantile(p: float) -> float:
    return float(mp_quantile(p))


def wilson(p_hat: float, n: int, alpha: float) -> tuple[float, float]:
    """Straight transcription of the Wilson score interval, clamped to [0, 1]."""
    if n == 0:
        return 0.0, 1.0
    z = -mp_quantile(alpha / 2)
    p, n = mp.mpf(p_hat), mp.mpf(n)
    center = p + z**2 / (2 * n)
    half = z * mp.sqrt(p * (1 - p) / n + z**2 / (4 * n**2))
    denom = 1 + z**2 / n
    lo, hi = (center - half) / denom, (center + half) / denom
    return min(max(float(lo), 0.0), 1.0), min(max(float(hi), 0.0), 1.0)


def sr_schedule(num_arms: int, budget: int) -> list[int]:
    logbar = 0.5 + sum(1.0 / i for i in range(2, num_arms + 1))
    return [math.ceil((budget - num_arms) / (logbar * (num_arms + 1 - j))) for j in range(1, num_arms)]


def sr_usage(num_arms: int, budget: int) -> int:
    # phase j pulls (K + 1 - j) survivors up to n_j each; the last survivor reaches n_{K-1}
    n = sr_schedule(num_arms, budget)
    return sum(n[:-1]) + 2 * n[-1]


def sh_usage(num_arms: int, budget: int) -> int:
    rounds = math.ceil(math.log2(num_arms))
    used, size = 0, num_arms
    for _ in range(rounds):
        used += size * (budget // (size * rounds))
        size = math.ceil(size / 2)
    return used
