"""Hybrid near/far-field channel synthesis on top of the scene geometry."""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from twinbeam.channel.models import LinkChannel, NlosPath, PathLossModel
from twinbeam.scene.geometry import (
    distance_to_ue,
    element_distances,
    far_field_distances,
    link_regime,
    planar_offsets,
)
from twinbeam.scene.models import Regime, Scene

COHERENCE_FACTOR = 0.423


def path_loss(model: PathLossModel, d: float) -> float:
    if d <= 0:
        raise ValueError(f"Distance must be positive, got {d}")
    return model.c0 * (d / model.d_ref) ** (-model.alpha)


def los_gain(wavelength: float, d: float) -> float:
    if d <= 0:
        raise ValueError(f"Distance must be positive, got {d}")
    return (wavelength / (4.0 * math.pi * d)) ** 2


def _los_distances(scene: Scene, k: int, u, regime: Regime) -> np.ndarray:
    exact = element_distances(scene, k, u)
    if np.any(exact == 0.0):
        raise ValueError(f"Point {u} coincides with an element of transmitter {k}")
    if regime == Regime.NF:
        return exact
    return far_field_distances(scene, k, u)


def los_channel(scene: Scene, k: int, u, regime: Regime) -> np.ndarray:
    d = distance_to_ue(scene, k, u)
    distances = _los_distances(scene, k, u, regime)
    amplitude = math.sqrt(los_gain(scene.wavelength, d))
    return amplitude * np.exp(-2j * math.pi / scene.wavelength * distances)


def nlos_paths(
    scene: Scene, k: int, u, rng: Optional[np.random.Generator] = None
) -> List[NlosPath]:
    """Single-bounce paths of link k via the transmitter's scatterers.

    Reflection coefficients come from the scene; ``rng`` is only used for a
    scene built without frozen reflections.
    """
    tx = scene.transmitter(k)
    point = np.asarray(u, dtype=float).reshape(3)
    scatterers = scene.scatterers_of(k)
    reflections = scene.reflections_of(k)
    if reflections is None or len(reflections) != len(scatterers):
        if rng is None:
            raise ValueError(f"Transmitter {k} has no frozen reflections and no random stream was given")
        magnitude = rng.uniform(0.3, 0.9, size=len(scatterers))
        reflections = magnitude * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=len(scatterers)))

    paths = []
    for scatterer, reflection in zip(scatterers, reflections):
        paths.append(
            NlosPath(
                scatterer=scatterer,
                reflection=complex(reflection),
                r_bs=float(np.linalg.norm(tx.center - scatterer)),
                r_ue=float(np.linalg.norm(scatterer - point)),
            )
        )
    return paths


def nlos_path_loss(path: NlosPath, wavelength: float) -> float:
    if path.r_bs <= 0 or path.r_ue <= 0:
        raise ValueError("NLoS path distances must be positive")
    return wavelength ** 2 * abs(path.reflection) ** 2 / ((4.0 * math.pi) ** 2 * path.r_bs * path.r_ue)


def _nlos_distances(scene: Scene, k: int, path: NlosPath, regime: Regime) -> np.ndarray:
    tx = scene.transmitter(k)
    if regime == Regime.NF:
        return np.linalg.norm(tx.array.element_positions - path.scatterer, axis=1) + path.r_ue
    total = path.r_bs + path.r_ue
    if scene.far_field_model == "common":
        return np.full(tx.array.num_elements, total)
    return total - planar_offsets(scene, k, (path.scatterer - tx.center) / path.r_bs)


def hybrid_channel(
    scene: Scene,
    model: PathLossModel,
    k: int,
    u,
    regime: Regime,
    blockage: float,
    paths: Sequence[NlosPath],
) -> LinkChannel:
    if blockage != 1.0 and blockage != scene.blockage_factor:
        raise ValueError(f"Blockage must be 1 or {scene.blockage_factor}, got {blockage}")

    wavelength = scene.wavelength
    wavenumber = 2.0 * math.pi / wavelength
    d = distance_to_ue(scene, k, u)
    excess = path_loss(model, d)

    lambda_los = excess * los_gain(wavelength, d)
    physical = math.sqrt(lambda_los) * np.exp(-1j * wavenumber * _los_distances(scene, k, u, regime))

    lambda_nlos = 0.0
    for path in paths:
        gain = excess * nlos_path_loss(path, wavelength)
        lambda_nlos += gain
        # |coefficient|^2 equals the path-wise gain; the phase is the reflection's
        coefficient = math.sqrt(excess) * wavelength * path.reflection / (
            4.0 * math.pi * math.sqrt(path.r_bs * path.r_ue)
        )
        physical = physical + coefficient * np.exp(-1j * wavenumber * _nlos_distances(scene, k, path, regime))

    lambda_total = lambda_los + lambda_nlos
    h = physical / math.sqrt(lambda_total)
    h_eff = math.sqrt(lambda_total * blockage) * h
    return LinkChannel(
        k=k,
        regime=Regime(regime),
        blockage=float(blockage),
        h=h,
        lambda_los=lambda_los,
        lambda_nlos=lambda_nlos,
        lambda_total=lambda_total,
        h_eff=h_eff,
    )


def link_channel(
    scene: Scene,
    model: PathLossModel,
    k: int,
    point,
    blockage: float,
    regime: Optional[Regime] = None,
) -> LinkChannel:
    """Channel of transmitter k toward ``point`` with the scene's scatterers.

    The regime is classified from the distance unless one is forced.
    """
    if regime is None:
        regime = link_regime(scene, k, point)
    return hybrid_channel(scene, model, k, point, regime, blockage, nlos_paths(scene, k, point))


def doppler_and_coherence(speed: float, carrier: float) -> Tuple[float, float]:
    if speed < 0 or carrier <= 0:
        raise ValueError("speed must be >= 0 and carrier positive")
    doppler = speed * carrier / SPEED_OF_LIGHT
    if doppler == 0.0:
        return 0.0, math.inf
    return doppler, COHERENCE_FACTOR / doppler
