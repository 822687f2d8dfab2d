from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np

from twinbeam.dynamics.models import Hotspot
from twinbeam.scene.models import Scene


def hotspot_activate(hotspot: Hotspot, rng: np.random.Generator) -> Hotspot:
    if hotspot.intensity < 0:
        raise ValueError("Hotspot intensity must be >= 0")
    count = int(rng.poisson(hotspot.intensity))
    positions = hotspot.region.sample(rng, count)
    return replace(hotspot, active_users=count, user_positions=positions)


def assign_users(scene: Scene, users: np.ndarray) -> List[List[int]]:
    """Maps each hotspot user to the nearest interfering transmitter."""
    interferers = [tx for tx in scene.transmitters if tx.index != 0]
    assigned: List[List[int]] = [[] for _ in scene.transmitters]
    if not interferers:
        return assigned
    centers = np.stack([tx.center for tx in interferers])
    for i, user in enumerate(users):
        nearest = int(np.argmin(np.linalg.norm(centers - user, axis=1)))
        assigned[interferers[nearest].index].append(i)
    return assigned


def served_users(
    scene: Scene, hotspots: Sequence[Hotspot], home_users: Sequence[Optional[np.ndarray]]
):
    """Position of the user each interferer serves, and whether it is a hotspot user.

    An interferer with assigned hotspot users serves the one nearest to it;
    otherwise it serves its home user.
    """
    users = [h.user_positions for h in hotspots if h.active_users > 0]
    pool = np.concatenate(users) if users else np.zeros((0, 3))
    assignment = assign_users(scene, pool)

    positions = []
    serving_hotspot = []
    for tx in scene.transmitters:
        if tx.index == 0:
            positions.append(None)
            serving_hotspot.append(False)
            continue
        candidates = assignment[tx.index]
        if candidates:
            members = pool[candidates]
            nearest = members[int(np.argmin(np.linalg.norm(members - tx.center, axis=1)))]
            positions.append(nearest)
            serving_hotspot.append(True)
        else:
            home = home_users[tx.index]
            if home is None:
                raise ValueError(f"Interferer {tx.index} has no home user and no hotspot user")
            positions.append(np.asarray(home, dtype=float))
            serving_hotspot.append(False)
    return positions, np.array(serving_hotspot)
