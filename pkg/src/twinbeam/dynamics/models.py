from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from twinbeam.channel.models import LinkChannel, PathLossModel
from twinbeam.pydantic_compat import BaseModel, field_validator
from twinbeam.scene.models import Box


class SimulationConfig(BaseModel):
    dt: float = 1e-3
    v_max: float = 1.0
    mobility_sigma: float = 0.01
    history: int = 4
    horizon: int = 5
    steps: int = 100
    hotspot_intensity: float = 3.0
    path_loss: PathLossModel = PathLossModel()

    @field_validator("dt")
    def _check_dt(cls, value):
        if value <= 0:
            raise ValueError("dt must be positive")
        return value


@dataclass(frozen=True, eq=False)
class MobilityState:
    position: np.ndarray
    velocity: np.ndarray
    noise_sigma: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float).reshape(3))
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.velocity))

    def frozen(self) -> "MobilityState":
        """Same kinematics without the random perturbation."""
        return replace(self, noise_sigma=0.0)


@dataclass(frozen=True, eq=False)
class Hotspot:
    region: Box
    intensity: float
    active_users: int = 0
    user_positions: np.ndarray = None

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("Hotspot intensity must be >= 0")
        positions = self.user_positions
        if positions is None:
            positions = np.zeros((0, 3))
        positions = np.asarray(positions, dtype=float).reshape(-1, 3)
        if len(positions) != self.active_users:
            raise ValueError("Hotspot user count does not match its positions")
        object.__setattr__(self, "user_positions", positions)

    def cleared(self) -> "Hotspot":
        return replace(self, active_users=0, user_positions=np.zeros((0, 3)))


@dataclass(frozen=True, eq=False)
class EnvironmentSnapshot:
    """DT state at one step.

    User 0 is the tagged UE, user j >= 1 the user served by interferer j.
    ``channels[k][j]`` is the channel of transmitter k toward user j.
    """

    t: int
    mobility: MobilityState
    users: np.ndarray
    channels: Tuple[Tuple[LinkChannel, ...], ...]
    hotspots: Tuple[Hotspot, ...]
    hotspot_serving: np.ndarray

    @property
    def num_links(self) -> int:
        return len(self.channels)

    @property
    def position(self) -> np.ndarray:
        return self.mobility.position

    def tagged(self, k: int) -> LinkChannel:
        return self.channels[k][0]

    def tagged_matrix(self) -> np.ndarray:
        """Effective channels of every transmitter toward the tagged UE."""
        return np.stack([row[0].h_eff for row in self.channels])

    def own_matrix(self) -> np.ndarray:
        """Row k: effective channel of transmitter k toward its own served user."""
        return np.stack([self.channels[k][k].h_eff for k in range(self.num_links)])

    def cross_matrix(self) -> np.ndarray:
        """(K+1, K+1, M) effective channels, transmitter by user."""
        return np.stack([np.stack([ch.h_eff for ch in row]) for row in self.channels])

    @property
    def regimes(self) -> np.ndarray:
        return np.array([int(row[0].regime) for row in self.channels])

    @property
    def blockage(self) -> np.ndarray:
        return np.array([row[0].blockage for row in self.channels])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([row[0].lambda_total for row in self.channels])

    @property
    def hotspot_users(self) -> int:
        return int(sum(h.active_users for h in self.hotspots))

    def events(self) -> np.ndarray:
        """Per link: (blockage active, serving a hotspot user)."""
        blocked = self.blockage < 1.0
        return np.stack([blocked, self.hotspot_serving.astype(bool)], axis=1)


@dataclass(frozen=True, eq=False)
class DtFeatures:
    """X^DT at step t; history arrays run from t - T_h to t."""

    t: int
    seed: int
    history_channels: np.ndarray
    history_positions: np.ndarray
    history_lambdas: np.ndarray
    history_blockage: np.ndarray
    history_regimes: np.ndarray
    events: np.ndarray
    hotspot_users: int

    @property
    def history_length(self) -> int:
        return self.history_channels.shape[0]

    @property
    def position(self) -> np.ndarray:
        return self.history_positions[-1]

    @property
    def regimes(self) -> np.ndarray:
        return self.history_regimes[-1]

    @property
    def blockage(self) -> np.ndarray:
        return self.history_blockage[-1]


@dataclass(frozen=True, eq=False)
class DtTargets:
    """Y^DT: the realized horizon t+1..t+T under the beams in effect at t."""

    channels: np.ndarray
    lambdas: np.ndarray
    blockage: np.ndarray
    regimes: np.ndarray
    positions: np.ndarray
    interference: np.ndarray
    beams: np.ndarray
    powers: np.ndarray

    @property
    def horizon(self) -> int:
        return self.channels.shape[0]


@dataclass(frozen=True, eq=False)
class DtSample:
    features: DtFeatures
    targets: Optional[DtTargets]

    def __post_init__(self):
        if self.targets is not None and self.targets.channels.shape[1:] != self.features.history_channels.shape[1:]:
            raise ValueError("Target channels do not match the history layout")
