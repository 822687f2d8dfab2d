from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

_ORTHONORMAL_TOL = 1e-9


class Regime(IntEnum):
    """Propagation regime flag; the value is the rho used in unified distances."""

    FF = 0
    NF = 1


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box in meters."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).reshape(3)
        upper = np.asarray(self.upper, dtype=float).reshape(3)
        if np.any(lower >= upper):
            raise ValueError(f"Box lower corner {lower} must be below upper corner {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def contains(self, point, strict: bool = False) -> bool:
        p = np.asarray(point, dtype=float)
        if strict:
            return bool(np.all(p > self.lower) and np.all(p < self.upper))
        return bool(np.all(p >= self.lower) and np.all(p <= self.upper))

    def sample(self, rng: np.random.Generator, count: Optional[int] = None) -> np.ndarray:
        size = 3 if count is None else (count, 3)
        return rng.uniform(self.lower, self.upper, size=size)


@dataclass(frozen=True, eq=False)
class UpaGeometry:
    nx: int
    ny: int
    spacing: float
    orientation: np.ndarray
    element_positions: np.ndarray

    @classmethod
    def build(
        cls,
        center,
        nx: int,
        ny: int,
        spacing: float,
        orientation=None,
    ) -> "UpaGeometry":
        """Places nx*ny elements on a regular grid centered on ``center``.

        The local grid spans the first two columns of ``orientation``;
        element m = ix * ny + iy.
        """
        if nx < 1 or ny < 1:
            raise ValueError("UPA element counts must be >= 1")
        if spacing <= 0:
            raise ValueError("UPA spacing must be positive")

        rotation = np.eye(3) if orientation is None else np.asarray(orientation, dtype=float)
        if rotation.shape != (3, 3):
            raise ValueError("orientation must be a 3x3 matrix")
        if not np.allclose(rotation.T @ rotation, np.eye(3), atol=_ORTHONORMAL_TOL):
            raise ValueError("orientation must be orthonormal")

        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        local = np.stack(
            [
                (ix.ravel() - (nx - 1) / 2.0) * spacing,
                (iy.ravel() - (ny - 1) / 2.0) * spacing,
                np.zeros(nx * ny),
            ],
            axis=1,
        )
        positions = np.asarray(center, dtype=float).reshape(1, 3) + local @ rotation.T
        return cls(nx=nx, ny=ny, spacing=float(spacing), orientation=rotation, element_positions=positions)

    @property
    def num_elements(self) -> int:
        return self.nx * self.ny

    @property
    def aperture(self) -> float:
        return self.spacing * float(np.sqrt((self.nx - 1) ** 2 + (self.ny - 1) ** 2))


@dataclass(frozen=True, eq=False)
class Transmitter:
    index: int
    center: np.ndarray
    array: UpaGeometry
    tx_power: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        if self.tx_power <= 0:
            raise ValueError(f"Transmitter {self.index}: tx_power must be positive")


@dataclass(frozen=True, eq=False)
class Scene:
    """Immutable geometric twin of the deployment.

    ``scatterers[k]`` holds the L-1 scatterer positions of transmitter k and
    ``reflections[k]`` their frozen complex reflection coefficients.
    """

    room: Box
    transmitters: Tuple[Transmitter, ...]
    obstacles: Tuple[Box, ...] = ()
    scatterers: Tuple[np.ndarray, ...] = ()
    reflections: Tuple[np.ndarray, ...] = ()
    carrier_frequency: float = 100.0e9
    blockage_factor: float = 0.01
    far_field_model: str = "common"
    _by_index: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be positive")
        if not 0.0 < self.blockage_factor <= 1.0:
            raise ValueError("blockage_factor must lie in (0, 1]")
        if self.far_field_model not in ("common", "planar"):
            raise ValueError(f"Unknown far_field_model '{self.far_field_model}'")

        by_index = {}
        for tx in self.transmitters:
            if tx.index in by_index:
                raise ValueError(f"Duplicate transmitter index {tx.index}")
            by_index[tx.index] = tx
            if not self.room.contains(tx.center):
                raise ValueError(f"Transmitter {tx.index} lies outside the room")
            for box in self.obstacles:
                inside = np.all(tx.array.element_positions >= box.lower, axis=1) & np.all(
                    tx.array.element_positions <= box.upper, axis=1
                )
                if np.any(inside):
                    raise ValueError(f"Obstacle contains array elements of transmitter {tx.index}")
        object.__setattr__(self, "_by_index", by_index)

        for k, points in enumerate(self.scatterers):
            for point in np.asarray(points).reshape(-1, 3):
                if not self.room.contains(point):
                    raise ValueError(f"Scatterer of transmitter {k} lies outside the room")
        for k, coefficients in enumerate(self.reflections):
            if np.any(np.abs(coefficients) > 1.0):
                raise ValueError(f"Reflection of transmitter {k} exceeds unit magnitude")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def num_links(self) -> int:
        return len(self.transmitters)

    @property
    def num_elements(self) -> int:
        return self.transmitters[0].array.num_elements

    def transmitter(self, k: int) -> Transmitter:
        try:
            return self._by_index[k]
        except KeyError:
            raise KeyError(f"Unknown transmitter index {k}") from None

    def scatterers_of(self, k: int) -> np.ndarray:
        self.transmitter(k)
        if k >= len(self.scatterers):
            return np.zeros((0, 3))
        return np.asarray(self.scatterers[k]).reshape(-1, 3)

    def reflections_of(self, k: int) -> Optional[np.ndarray]:
        if k >= len(self.reflections):
            return None
        return np.asarray(self.reflections[k])
