from dataclasses import dataclass, field
from typing import List

import numpy as np


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """Link-level figures of one (scheme, K) over one or more seeds.

    Interference in watts, rates in bit/s/Hz, throughput in bit/s.
    """

    scheme: str
    k: int
    seeds: List[int]
    avg_interference: float
    sinr_samples: np.ndarray
    thresholds_db: np.ndarray
    outage: np.ndarray
    rmse_per_horizon: np.ndarray
    rmse: float
    min_rate: float
    throughput: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(self.outage < 0) or np.any(self.outage > 1):
            raise ValueError("Outage probabilities must lie in [0, 1]")
        if np.any(np.diff(self.outage) < 0):
            raise ValueError("Outage must be non-decreasing in the threshold")
        if self.min_rate < 0:
            raise ValueError("min_rate must be >= 0")
        if not np.all(np.isfinite(self.sinr_samples)):
            raise ValueError("SINR samples must be finite")
