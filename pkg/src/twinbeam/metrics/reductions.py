import math
from typing import Tuple

import numpy as np

DEFAULT_THRESHOLDS_DB = np.linspace(-5.0, 20.0, 51)


def to_db(value):
    return 10.0 * np.log10(value)


def from_db(value):
    return 10.0 ** (np.asarray(value, dtype=float) / 10.0)


def avg_interference(trace) -> float:
    values = np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("Cannot average an empty interference trace")
    return math.fsum(values.tolist()) / values.size


def outage(sinr_samples, thresholds) -> np.ndarray:
    """Fraction of samples strictly below each linear threshold."""
    if np.size(sinr_samples) == 0:
        raise ValueError("outage needs at least one SINR sample")
    return cdf_at(sinr_samples, thresholds, left=True)


def sinr_cdf(samples) -> Tuple[np.ndarray, np.ndarray]:
    """Right-continuous empirical CDF at each distinct sample value."""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise ValueError("sinr_cdf needs at least one sample")
    points, counts = np.unique(values, return_counts=True)
    return points, np.cumsum(counts) / values.size


def cdf_at(samples, points, left: bool = False) -> np.ndarray:
    """Empirical CDF F(x), or F(x-) with ``left``."""
    ordered = np.sort(np.asarray(samples, dtype=float))
    side = "left" if left else "right"
    return np.searchsorted(ordered, np.asarray(points, dtype=float), side=side) / ordered.size


def rate(sinr) -> np.ndarray:
    return np.log2(1.0 + np.asarray(sinr, dtype=float))


def min_rate(user_sinrs) -> float:
    values = np.asarray(user_sinrs, dtype=float)
    if values.size == 0:
        raise ValueError("min_rate needs at least one user")
    return float(np.min(rate(values)))


def interference_reduction_gain(reference: float, value: float) -> float:
    """Gain in dB of ``value`` over ``reference``; positive means less interference."""
    if reference <= 0 or value <= 0:
        raise ValueError("Interference levels must be positive")
    return float(10.0 * math.log10(reference / value))
