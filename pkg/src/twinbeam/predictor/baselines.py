"""Non-learned predictors: constant-velocity DT roll, oracle and hold."""
from typing import Optional, Sequence

import numpy as np

from twinbeam.beamform.models import BeamformerSet
from twinbeam.channel.models import PathLossModel
from twinbeam.channel.synthesis import link_channel
from twinbeam.dynamics.blockage import blockage_process
from twinbeam.dynamics.mobility import mobility_step
from twinbeam.dynamics.models import EnvironmentSnapshot, MobilityState
from twinbeam.predictor.models import TrajectoryBundle
from twinbeam.scene.models import Regime, Scene


def _bundle_from_steps(
    t, channels, lambdas, blockage, regimes, positions, beams, noise, blockage_factor=None
) -> TrajectoryBundle:
    return TrajectoryBundle.assemble(
        t=t,
        channels=np.asarray(channels)[None],
        lambdas=np.asarray(lambdas)[None],
        blockage=np.asarray(blockage)[None],
        regimes=np.asarray(regimes)[None],
        positions=np.asarray(positions)[None],
        beams=beams,
        noise=noise,
        blockage_factor=blockage_factor,
    )


def deterministic_dt_predict(
    scene: Scene,
    state: MobilityState,
    horizon: int,
    dt: float,
    path_loss: PathLossModel,
    beams: BeamformerSet,
    noise: float,
    t: int = 0,
    regime_aware: bool = True,
) -> TrajectoryBundle:
    """Single future from the noiseless mobility roll and the DT geometry."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    current = state.frozen()
    channels, lambdas, blockage, regimes, positions = [], [], [], [], []
    for _ in range(horizon):
        current = mobility_step(current, dt, None, scene.room, scene.obstacles)
        point = current.position
        row = []
        for tx in scene.transmitters:
            xi = blockage_process(scene, tx.index, point)
            row.append(link_channel(scene, path_loss, tx.index, point, xi, regime=None if regime_aware else Regime.FF))
        channels.append([ch.h_eff for ch in row])
        lambdas.append([ch.lambda_total for ch in row])
        blockage.append([ch.blockage for ch in row])
        regimes.append([int(ch.regime) for ch in row])
        positions.append(point)
    return _bundle_from_steps(t, channels, lambdas, blockage, regimes, positions, beams, noise, scene.blockage_factor)


def oracle_predict(
    snapshots: Sequence[EnvironmentSnapshot],
    t: int,
    horizon: int,
    beams: BeamformerSet,
    noise: float,
    blockage_factor: Optional[float] = None,
) -> TrajectoryBundle:
    """The realized continuation t+1..t+T of the scenario."""
    future = snapshots[t + 1 : t + 1 + horizon]
    if len(future) < horizon:
        raise ValueError(f"Scenario ends before t+{horizon}")
    return _bundle_from_steps(
        t,
        [s.tagged_matrix() for s in future],
        [s.lambdas for s in future],
        [s.blockage for s in future],
        [s.regimes for s in future],
        [s.position for s in future],
        beams,
        noise,
        blockage_factor,
    )


def hold_predict(
    snapshot: EnvironmentSnapshot,
    horizon: int,
    beams: BeamformerSet,
    noise: float,
    blockage_factor: Optional[float] = None,
) -> TrajectoryBundle:
    """Zero-order hold: the current channels repeated over the horizon."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return _bundle_from_steps(
        snapshot.t,
        [snapshot.tagged_matrix()] * horizon,
        [snapshot.lambdas] * horizon,
        [snapshot.blockage] * horizon,
        [snapshot.regimes] * horizon,
        [snapshot.position] * horizon,
        beams,
        noise,
        blockage_factor,
    )
