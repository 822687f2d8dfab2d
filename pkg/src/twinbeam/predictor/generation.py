"""Sampling future trajectories from a trained generator."""
import logging
from typing import Optional

import numpy as np
import torch

from twinbeam.beamform.models import BeamformerSet
from twinbeam.channel.models import PathLossModel
from twinbeam.channel.synthesis import link_channel
from twinbeam.dynamics.models import DtFeatures
from twinbeam.predictor.features import conditioning_raw
from twinbeam.predictor.models import ConditioningVector, TrajectoryBundle
from twinbeam.predictor.network import GenerativeModel
from twinbeam.scene.geometry import link_regime
from twinbeam.scene.models import Regime, Scene

logger = logging.getLogger(__name__)

BLOCKAGE_THRESHOLD = 0.5


def conditioning_vector(model: GenerativeModel, features: DtFeatures) -> ConditioningVector:
    raw = conditioning_raw(features, model.layout)
    return ConditioningVector(
        values=model.cond_stats.apply(raw),
        position=features.position,
        regimes=features.regimes,
        blockage=features.blockage,
    )


def sample_latents(model: GenerativeModel, samples: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((samples, model.latent_dim))


def decode_trajectories(model: GenerativeModel, conditioning: ConditioningVector, latents: np.ndarray) -> np.ndarray:
    """Denormalized trajectory tensors shaped (M, T, step_dim)."""
    cond = torch.as_tensor(np.tile(conditioning.values, (len(latents), 1)), dtype=torch.float64)
    z = torch.as_tensor(latents, dtype=torch.float64)
    with torch.no_grad():
        emitted = model.generator.emit(cond, z).numpy()
    layout = model.layout
    return model.denormalize_targets(emitted).reshape(len(latents), layout.horizon, layout.step_dim)


def generate_trajectories(
    model: GenerativeModel,
    conditioning: ConditioningVector,
    scene: Scene,
    path_loss: PathLossModel,
    beams: BeamformerSet,
    noise: float,
    samples: int,
    rng: Optional[np.random.Generator] = None,
    latents: Optional[np.ndarray] = None,
    regime_aware: bool = True,
    t: int = 0,
) -> TrajectoryBundle:
    """Draws M futures and rebuilds their effective channels.

    The generator emits UE offsets, per-link large-scale gains and clear-LoS
    probabilities; the channel shape is synthesized at the predicted
    position (forced far field when ``regime_aware`` is False) and scaled by
    sqrt(Lambda * xi), xi quantized to {1, eta}.

    Raises:
        UntrainedModelError: If the model was never trained.
        ValueError: If ``samples`` < 1, or the latents or conditioning do
            not match the model.
    """
    model.require_trained()
    if conditioning.dim != model.layout.cond_dim:
        raise ValueError(f"Conditioning has {conditioning.dim} values, model expects {model.layout.cond_dim}")
    if samples < 1:
        raise ValueError("At least one trajectory sample is required")
    if latents is None:
        if rng is None:
            raise ValueError("A random stream or explicit latents are required")
        latents = sample_latents(model, samples, rng)
    latents = np.asarray(latents, dtype=float)
    if latents.shape != (samples, model.latent_dim):
        raise ValueError(f"latents must be shaped {(samples, model.latent_dim)}")

    layout = model.layout
    decoded = decode_trajectories(model, conditioning, latents)
    offsets = decoded[:, :, :3]
    lambdas = 10.0 ** decoded[:, :, 3 : 3 + layout.links]
    clear = decoded[:, :, 3 + layout.links : 3 + 2 * layout.links]
    blockage = np.where(clear >= BLOCKAGE_THRESHOLD, 1.0, scene.blockage_factor)

    positions = np.clip(conditioning.position + offsets, scene.room.lower, scene.room.upper)
    channels = np.zeros((samples, layout.horizon, layout.links, layout.elements), dtype=complex)
    regimes = np.zeros((samples, layout.horizon, layout.links), dtype=int)
    for m in range(samples):
        for tau in range(layout.horizon):
            point = positions[m, tau]
            for k in range(layout.links):
                regime = link_regime(scene, k, point) if regime_aware else Regime.FF
                shape = link_channel(scene, path_loss, k, point, 1.0, regime=regime).h
                channels[m, tau, k] = np.sqrt(lambdas[m, tau, k] * blockage[m, tau, k]) * shape
                regimes[m, tau, k] = int(regime)

    return TrajectoryBundle.assemble(
        t=t,
        channels=channels,
        lambdas=lambdas,
        blockage=blockage,
        regimes=regimes,
        positions=positions,
        beams=beams,
        noise=noise,
        blockage_factor=scene.blockage_factor,
    )
