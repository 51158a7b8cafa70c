"""Interval helpers shared by the experiment drivers."""

from __future__ import annotations

import math

import numpy as np

Z95 = 1.959963984540054
Z99 = 2.5758293035489004


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("need at least one trial")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return center - half, center + half


def wilson_half_width(successes: int, n: int, z: float = Z95) -> float:
    lo, hi = wilson_interval(successes, n, z)
    return (hi - lo) / 2.0


def mean_with_ci(values, z: float = Z95) -> tuple[float, float]:
    """Sample mean and normal-approximation half-width."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("need at least one value")
    mean = float(arr.mean())
    if arr.size == 1:
        return mean, math.inf
    sem = float(arr.std(ddof=1)) / math.sqrt(arr.size)
    return mean, z * sem
