"""Schema of the scene file (YAML). See docs/SCENE_FORMAT.md."""
import logging
import os
from typing import List, Literal, Optional

import yaml

from twinbeam.pydantic_compat import BaseModel, field_validator

logger = logging.getLogger(__name__)


def _vector3(value):
    if value is None:
        return value
    if len(value) != 3:
        raise ValueError(f"expected a 3-vector, got {len(value)} values")
    return [float(v) for v in value]


class BoxConfig(BaseModel):
    lower: List[float]
    upper: List[float]

    @field_validator("lower", "upper")
    def _check_vector(cls, value):
        return _vector3(value)


class ArrayConfig(BaseModel):
    nx: int = 16
    ny: int = 16
    # None means half a wavelength
    spacing: Optional[float] = None
    # Rows of a 3x3 rotation; None keeps the array in the horizontal plane
    orientation: Optional[List[List[float]]] = None

    @field_validator("nx", "ny")
    def _check_count(cls, value):
        if value < 1:
            raise ValueError("element counts must be >= 1")
        return value


class AccessPointConfig(BaseModel):
    center: List[float]
    # Fixed desk user served when no hotspot user is assigned
    home_user: Optional[List[float]] = None

    @field_validator("center", "home_user")
    def _check_vector(cls, value):
        return _vector3(value)


class HotspotConfig(BaseModel):
    region: BoxConfig
    active_from: int = 0
    active_until: Optional[int] = None
    # None falls back to the experiment's hotspot intensity
    intensity: Optional[float] = None

    def is_active(self, step: int) -> bool:
        if step < self.active_from:
            return False
        return self.active_until is None or step < self.active_until


class UeConfig(BaseModel):
    start: List[float]
    heading: List[float] = [1.0, 0.0, 0.0]

    @field_validator("start", "heading")
    def _check_vector(cls, value):
        return _vector3(value)


class SceneConfig(BaseModel):
    carrier_frequency: float = 100.0e9
    room: BoxConfig = BoxConfig(lower=[0.0, 0.0, 0.0], upper=[10.0, 10.0, 3.0])
    array: ArrayConfig = ArrayConfig()
    far_field_model: Literal["common", "planar"] = "common"
    paths_per_link: int = 3
    serving: AccessPointConfig
    interferers: List[AccessPointConfig] = []
    obstacles: List[BoxConfig] = []
    hotspots: List[HotspotConfig] = []
    ue: UeConfig

    @field_validator("carrier_frequency")
    def _check_frequency(cls, value):
        if value <= 0:
            raise ValueError("carrier_frequency must be positive")
        return value

    @field_validator("paths_per_link")
    def _check_paths(cls, value):
        if value < 1:
            raise ValueError("paths_per_link counts the LoS path and must be >= 1")
        return value


def load_scene_config(path: str) -> SceneConfig:
    """Loads and validates a scene file.

    Args:
        path: YAML file path.

    Returns:
        The validated SceneConfig.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the content does not match the schema.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Scene file not found: {path}")

    with open(path, "r") as f:
        raw = yaml.safe_load(f) or {}

    if not isinstance(raw, dict):
        raise ValueError(f"Scene file {path} must contain a mapping")

    scene_config = SceneConfig.model_validate(raw)
    logger.debug(
        "Loaded scene %s with %d interferers and %d obstacles",
        path,
        len(scene_config.interferers),
        len(scene_config.obstacles),
    )
    return scene_config
