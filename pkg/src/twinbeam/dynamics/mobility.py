from typing import Optional, Sequence

import numpy as np

from twinbeam.dynamics.models import MobilityState
from twinbeam.scene.models import Box


def _reflect_room(position: np.ndarray, velocity: np.ndarray, room: Box) -> None:
    for axis in range(3):
        lower, upper = room.lower[axis], room.upper[axis]
        if position[axis] < lower:
            position[axis] = 2.0 * lower - position[axis]
            velocity[axis] = -velocity[axis]
        elif position[axis] > upper:
            position[axis] = 2.0 * upper - position[axis]
            velocity[axis] = -velocity[axis]
    np.clip(position, room.lower, room.upper, out=position)


def _reflect_obstacles(position: np.ndarray, velocity: np.ndarray, obstacles: Sequence[Box]) -> None:
    for box in obstacles:
        if not box.contains(position, strict=True):
            continue
        # Leave through the face of least penetration
        to_lower = position - box.lower
        to_upper = box.upper - position
        depth = np.minimum(to_lower, to_upper)
        axis = int(np.argmin(depth))
        if to_lower[axis] <= to_upper[axis]:
            position[axis] = 2.0 * box.lower[axis] - position[axis]
        else:
            position[axis] = 2.0 * box.upper[axis] - position[axis]
        velocity[axis] = -velocity[axis]


def mobility_step(
    state: MobilityState,
    dt: float,
    rng: Optional[np.random.Generator],
    room: Box,
    obstacles: Sequence[Box] = (),
) -> MobilityState:
    """Advances u(t+1) = u(t) + v(t) dt + eps(t).

    Walls reflect the heading and keep the speed; the position is clamped to
    the room after reflection.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")

    position = state.position + state.velocity * dt
    if state.noise_sigma > 0:
        if rng is None:
            raise ValueError("A random stream is required when noise_sigma > 0")
        position = position + rng.normal(0.0, state.noise_sigma, size=3)
    velocity = state.velocity.copy()

    _reflect_room(position, velocity, room)
    if obstacles:
        _reflect_obstacles(position, velocity, obstacles)
        _reflect_room(position, velocity, room)

    return MobilityState(position=position, velocity=velocity, noise_sigma=state.noise_sigma)


def initial_state(start, heading, speed: float, noise_sigma: float) -> MobilityState:
    direction = np.asarray(heading, dtype=float)
    norm = np.linalg.norm(direction)
    velocity = np.zeros(3) if norm == 0.0 else direction / norm * speed
    return MobilityState(position=np.asarray(start, dtype=float), velocity=velocity, noise_sigma=noise_sigma)
