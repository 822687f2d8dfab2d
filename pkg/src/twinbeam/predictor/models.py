from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from twinbeam.beamform.interference import aggregate_interference, predicted_sinr
from twinbeam.beamform.models import BeamformerSet
from twinbeam.pydantic_compat import BaseModel, field_validator


OPTIMIZERS = ("adam", "sgd")


class TrainingConfig(BaseModel):
    lambda_pred: float = 10.0
    mu: float = 1.0
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    # sgd only
    momentum: float = 0.0
    # adam only
    beta1: float = 0.5
    # Max gradient norm per update; 0 disables clipping
    grad_clip: float = 1.0
    epochs: int = 200
    batch_size: int = 32
    latent_dim: int = 16
    hidden: int = 128
    label_smoothing: float = 0.9
    validation_fraction: float = 0.2
    # Channel history uses this many evenly spaced array elements per link
    history_elements: int = 8
    seed: int = 0

    @field_validator("lambda_pred", "mu", "momentum", "grad_clip")
    def _check_non_negative(cls, value):
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("optimizer")
    def _check_optimizer(cls, value):
        value = value.lower()
        if value not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {', '.join(OPTIMIZERS)}")
        return value

    @field_validator("beta1")
    def _check_beta(cls, value):
        if not 0.0 <= value < 1.0:
            raise ValueError("beta1 must lie in [0, 1)")
        return value

    @field_validator("learning_rate")
    def _check_rate(cls, value):
        if value <= 0:
            raise ValueError("learning_rate must be positive")
        return value

    @field_validator("epochs", "batch_size", "latent_dim", "hidden", "history_elements")
    def _check_count(cls, value):
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("label_smoothing")
    def _check_smoothing(cls, value):
        if not 0.5 < value <= 1.0:
            raise ValueError("label_smoothing must lie in (0.5, 1]")
        return value

    @field_validator("validation_fraction")
    def _check_fraction(cls, value):
        if not 0.0 <= value < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")
        return value


@dataclass(frozen=True, eq=False)
class ConditioningVector:
    """Normalized conditioning input of the generator for one decision step."""

    values: np.ndarray
    position: np.ndarray
    regimes: np.ndarray
    blockage: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.values.shape[-1])


@dataclass(frozen=True, eq=False)
class NormalizationStats:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, data: np.ndarray) -> "NormalizationStats":
        mean = data.mean(axis=0)
        std = data.std(axis=0)
        # Constant columns pass through centered
        std = np.where(std > 1e-12, std, 1.0)
        return cls(mean=mean, std=std)

    def apply(self, data: np.ndarray) -> np.ndarray:
        return (data - self.mean) / self.std

    def invert(self, data: np.ndarray) -> np.ndarray:
        return data * self.std + self.mean

    def to_lists(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_lists(cls, payload: dict) -> "NormalizationStats":
        return cls(mean=np.asarray(payload["mean"], dtype=float), std=np.asarray(payload["std"], dtype=float))


@dataclass(frozen=True, eq=False)
class TrajectoryBundle:
    """M sampled futures over t+1..t+T.

    ``channels[m, tau, k]`` is the predicted effective channel of transmitter
    k toward the tagged UE; ``interference`` and ``sinr`` are (M, T) and
    follow from the channels and the beams the bundle was evaluated with.
    With ``blockage_factor`` set, every blockage entry must be 1 or eta.
    """

    t: int
    channels: np.ndarray
    lambdas: np.ndarray
    blockage: np.ndarray
    regimes: np.ndarray
    positions: np.ndarray
    interference: np.ndarray
    sinr: np.ndarray
    blockage_factor: Optional[float] = None

    def __post_init__(self):
        if self.channels.ndim != 4 or self.channels.shape[0] < 1:
            raise ValueError("channels must be shaped (M, T, K+1, M_k) with M >= 1")
        samples, horizon, links = self.channels.shape[:3]
        for name in ("lambdas", "blockage", "regimes"):
            if getattr(self, name).shape != (samples, horizon, links):
                raise ValueError(f"{name} must be shaped {(samples, horizon, links)}")
        if self.interference.shape != (samples, horizon) or self.sinr.shape != (samples, horizon):
            raise ValueError("interference and sinr must be shaped (M, T)")
        if np.any(self.blockage <= 0) or np.any(self.blockage > 1):
            raise ValueError("blockage must lie in (0, 1]")
        if self.blockage_factor is not None:
            allowed = np.isclose(self.blockage, 1.0) | np.isclose(self.blockage, self.blockage_factor)
            if not np.all(allowed):
                raise ValueError(f"blockage must be 1 or {self.blockage_factor}")

    @classmethod
    def assemble(
        cls,
        t: int,
        channels: np.ndarray,
        lambdas: np.ndarray,
        blockage: np.ndarray,
        regimes: np.ndarray,
        positions: np.ndarray,
        beams: BeamformerSet,
        noise: float,
        blockage_factor: Optional[float] = None,
    ) -> "TrajectoryBundle":
        channels = np.asarray(channels, dtype=complex)
        return cls(
            t=t,
            channels=channels,
            lambdas=np.asarray(lambdas, dtype=float),
            blockage=np.asarray(blockage, dtype=float),
            regimes=np.asarray(regimes, dtype=int),
            positions=np.asarray(positions, dtype=float),
            interference=aggregate_interference(channels, beams),
            sinr=predicted_sinr(channels, beams, noise),
            blockage_factor=blockage_factor,
        )

    def evaluated(self, beams: BeamformerSet, noise: float) -> "TrajectoryBundle":
        return replace(
            self,
            interference=aggregate_interference(self.channels, beams),
            sinr=predicted_sinr(self.channels, beams, noise),
        )

    @property
    def num_samples(self) -> int:
        return self.channels.shape[0]

    @property
    def horizon(self) -> int:
        return self.channels.shape[1]

    @property
    def num_links(self) -> int:
        return self.channels.shape[2]

    def mean_interference(self) -> np.ndarray:
        return self.interference.mean(axis=0)

    def mean_sinr(self) -> np.ndarray:
        return self.sinr.mean(axis=0)


@dataclass(frozen=True, eq=False)
class TrainingLog:
    rows: List[dict]
    # Validation consistency loss of the freshly initialized generator
    initial_val_loss_pred: Optional[float] = None

    @property
    def epochs(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)

    def last(self) -> Optional[dict]:
        return self.rows[-1] if self.rows else None
