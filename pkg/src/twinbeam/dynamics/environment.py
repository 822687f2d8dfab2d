"""Seeded scenario roll: UE mobility, hotspot windows and per-step channels."""
import logging
from dataclasses import replace
from typing import List, Optional

import numpy as np

from twinbeam.channel.models import PathLossModel
from twinbeam.channel.synthesis import link_channel
from twinbeam.config.scene_file import SceneConfig
from twinbeam.dynamics.blockage import blockage_process
from twinbeam.dynamics.hotspots import hotspot_activate, served_users
from twinbeam.dynamics.mobility import initial_state, mobility_step
from twinbeam.dynamics.models import EnvironmentSnapshot, Hotspot, SimulationConfig
from twinbeam.scene.builder import box_from_config
from twinbeam.scene.models import Regime, Scene

logger = logging.getLogger(__name__)


def snapshot_channels(
    scene: Scene,
    model: PathLossModel,
    users: np.ndarray,
    regime: Optional[Regime] = None,
):
    """channels[k][j] for every transmitter k and user j.

    Blockage always follows the geometry; ``regime`` forces one regime on
    every link instead of classifying by distance.
    """
    rows = []
    for tx in scene.transmitters:
        row = []
        for point in users:
            xi = blockage_process(scene, tx.index, point)
            row.append(link_channel(scene, model, tx.index, point, xi, regime=regime))
        rows.append(tuple(row))
    return tuple(rows)


def _home_users(scene: Scene, scene_config: SceneConfig) -> List[Optional[np.ndarray]]:
    homes: List[Optional[np.ndarray]] = [None]
    for ap in scene_config.interferers[: scene.num_links - 1]:
        homes.append(None if ap.home_user is None else np.asarray(ap.home_user, dtype=float))
    return homes


def realize_environment(
    scene: Scene,
    scene_config: SceneConfig,
    sim: SimulationConfig,
    seed: int,
    steps: Optional[int] = None,
) -> List[EnvironmentSnapshot]:
    """Rolls the scenario for ``steps`` snapshots (default ``sim.steps``).

    Mobility and hotspot draws use independent substreams of ``seed`` so the
    UE path does not change when hotspots are reconfigured.
    """
    steps = sim.steps if steps is None else steps
    if steps < 1:
        raise ValueError("steps must be >= 1")

    mobility_seq, hotspot_seq = np.random.SeedSequence(seed).spawn(2)
    mobility_rng = np.random.default_rng(mobility_seq)
    hotspot_rng = np.random.default_rng(hotspot_seq)

    obstacles = list(scene.obstacles)
    state = initial_state(scene_config.ue.start, scene_config.ue.heading, sim.v_max, sim.mobility_sigma)
    if not scene.room.contains(state.position):
        raise ValueError(f"UE start {state.position} lies outside the room")

    hotspots = [
        Hotspot(
            region=box_from_config(h.region),
            intensity=sim.hotspot_intensity if h.intensity is None else h.intensity,
        )
        for h in scene_config.hotspots
    ]
    active = [False] * len(hotspots)
    homes = _home_users(scene, scene_config)

    snapshots: List[EnvironmentSnapshot] = []
    for t in range(steps):
        if t > 0:
            state = mobility_step(state, sim.dt, mobility_rng, scene.room, obstacles)

        for i, spec in enumerate(scene_config.hotspots):
            now_active = spec.is_active(t)
            if now_active and not active[i]:
                hotspots[i] = hotspot_activate(hotspots[i], hotspot_rng)
                logger.debug("Hotspot %d activated at step %d with %d users", i, t, hotspots[i].active_users)
            elif not now_active and active[i]:
                hotspots[i] = hotspots[i].cleared()
            active[i] = now_active

        targets, serving_hotspot = served_users(scene, hotspots, homes)
        users = np.stack([state.position] + targets[1:])
        snapshots.append(
            EnvironmentSnapshot(
                t=t,
                mobility=state,
                users=users,
                channels=snapshot_channels(scene, sim.path_loss, users),
                hotspots=tuple(hotspots),
                hotspot_serving=serving_hotspot,
            )
        )

    logger.debug("Realized %d steps for seed %d (%d links)", steps, seed, scene.num_links)
    return snapshots


def far_field_view(
    scene: Scene, model: PathLossModel, snapshot: EnvironmentSnapshot
) -> EnvironmentSnapshot:
    """The same snapshot with every link synthesized as far field."""
    return replace(snapshot, channels=snapshot_channels(scene, model, snapshot.users, regime=Regime.FF))
