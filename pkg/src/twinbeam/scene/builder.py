import logging
from typing import List

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from twinbeam.config.scene_file import BoxConfig, SceneConfig
from twinbeam.scene.models import Box, Scene, Transmitter, UpaGeometry

logger = logging.getLogger(__name__)

REFLECTION_MAGNITUDE_RANGE = (0.3, 0.9)
_MAX_REJECTIONS = 10000


def box_from_config(box: BoxConfig) -> Box:
    return Box(lower=np.array(box.lower), upper=np.array(box.upper))


def _sample_scatterers(
    rng: np.random.Generator, room: Box, obstacles: List[Box], count: int
) -> np.ndarray:
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > _MAX_REJECTIONS:
            raise ValueError("Could not place scatterers outside the obstacles")
        candidate = room.sample(rng)
        if any(box.contains(candidate) for box in obstacles):
            continue
        points.append(candidate)
    return np.array(points).reshape(count, 3)


def _sample_reflections(rng: np.random.Generator, count: int) -> np.ndarray:
    magnitude = rng.uniform(*REFLECTION_MAGNITUDE_RANGE, size=count)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return magnitude * np.exp(1j * phase)


def build_scene(
    scene_config: SceneConfig,
    n_interferers: int,
    scene_seed: int = 0,
    blockage_factor: float = 0.01,
    tx_power: float = 1e-3,
) -> Scene:
    """Builds the twin with the serving AP and the first ``n_interferers``.

    Scatterers and reflection coefficients of transmitter k come from their
    own substream of ``scene_seed``, so the geometry of transmitter k does
    not depend on how many interferers are active.

    Raises:
        ValueError: If the scene file lists fewer interferers than requested
            or the geometry violates the scene invariants.
    """
    if n_interferers > len(scene_config.interferers):
        raise ValueError(
            f"Scene defines {len(scene_config.interferers)} interferers, {n_interferers} requested"
        )

    wavelength = SPEED_OF_LIGHT / scene_config.carrier_frequency
    array = scene_config.array
    spacing = array.spacing if array.spacing is not None else wavelength / 2.0

    room = box_from_config(scene_config.room)
    obstacles = [box_from_config(b) for b in scene_config.obstacles]
    access_points = [scene_config.serving] + list(scene_config.interferers[:n_interferers])

    transmitters = []
    scatterers = []
    reflections = []
    n_scatterers = scene_config.paths_per_link - 1
    for k, ap in enumerate(access_points):
        geometry = UpaGeometry.build(ap.center, array.nx, array.ny, spacing, array.orientation)
        transmitters.append(Transmitter(index=k, center=np.array(ap.center), array=geometry, tx_power=tx_power))

        rng = np.random.default_rng(np.random.SeedSequence([scene_seed, k]))
        scatterers.append(_sample_scatterers(rng, room, obstacles, n_scatterers))
        reflections.append(_sample_reflections(rng, n_scatterers))

    scene = Scene(
        room=room,
        transmitters=tuple(transmitters),
        obstacles=tuple(obstacles),
        scatterers=tuple(scatterers),
        reflections=tuple(reflections),
        carrier_frequency=scene_config.carrier_frequency,
        blockage_factor=blockage_factor,
        far_field_model=scene_config.far_field_model,
    )
    logger.debug(
        "Built scene: %d transmitters, %d elements each, %d scatterers per transmitter",
        len(transmitters),
        scene.num_elements,
        n_scatterers,
    )
    return scene
