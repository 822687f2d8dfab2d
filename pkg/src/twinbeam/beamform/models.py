from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from twinbeam.pydantic_compat import BaseModel, field_validator

_NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BeamformerSet:
    """Row k of ``weights`` is w_k; ``powers[k]`` is the nominal P_k in watts."""

    weights: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        weights = np.atleast_2d(np.asarray(self.weights, dtype=complex))
        powers = np.asarray(self.powers, dtype=float).reshape(-1)
        if weights.shape[0] != powers.shape[0]:
            raise ValueError("One power per beam is required")
        if np.any(powers < 0):
            raise ValueError("Powers must be >= 0")
        norms = np.linalg.norm(weights, axis=1)
        if np.any(norms <= 0) or np.any(norms > 1.0 + _NORM_TOL):
            raise ValueError("Every beam norm must lie in (0, 1]")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "powers", powers)

    @property
    def num_beams(self) -> int:
        return self.weights.shape[0]

    def radiated_power(self) -> float:
        return float(np.sum(self.powers * np.linalg.norm(self.weights, axis=1) ** 2))

    def within_budget(self, budget: float) -> bool:
        return self.radiated_power() <= budget + _NORM_TOL

    def with_power(self, k: int, value: float) -> "BeamformerSet":
        powers = self.powers.copy()
        powers[k] = value
        return BeamformerSet(weights=self.weights, powers=powers)


class OptimizerConfig(BaseModel):
    gamma_min: float
    noise_power: float = 1e-11
    max_iters: int = 50
    tol: float = 1e-6
    # None selects 1e-6 * trace(H H^H) / K per solve
    zf_delta: Optional[float] = None
    # None uses the sum of nominal powers
    power_budget: Optional[float] = None
    verbose: bool = False

    @field_validator("gamma_min", "tol", "noise_power")
    def _check_positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("max_iters")
    def _check_iters(cls, value):
        if value < 1:
            raise ValueError("max_iters must be >= 1")
        return value


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    beams: BeamformerSet
    objective: float
    feasible: bool
    # (M, T) per-sample SINR constraint satisfaction
    feasibility: np.ndarray
    min_sinr: float
    iterations: int
    trace: List[dict] = field(default_factory=list)
