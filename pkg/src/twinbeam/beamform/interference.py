from typing import Iterable, Tuple

import numpy as np

from twinbeam.beamform.models import BeamformerSet


def beam_gain(h, w) -> float:
    """|h^H w|^2."""
    return float(abs(np.vdot(h, w)) ** 2)


def sinr(h0, w0, p0: float, interferers: Iterable[Tuple[np.ndarray, np.ndarray, float]], noise: float) -> float:
    if noise <= 0:
        raise ValueError("Noise power must be positive")
    interference = sum(p * beam_gain(h, w) for h, w, p in interferers)
    return p0 * beam_gain(h0, w0) / (interference + noise)


def link_gains(channels, beams: BeamformerSet) -> np.ndarray:
    """P_k |h_k^H w_k|^2 for channels shaped (..., K+1, M)."""
    h = np.asarray(channels, dtype=complex)
    projections = np.einsum("...km,km->...k", h.conj(), beams.weights)
    return beams.powers * np.abs(projections) ** 2


def aggregate_interference(channels, beams: BeamformerSet) -> np.ndarray:
    """Sum over interferers k >= 1 of P_k |h_k^H w_k|^2.

    ``channels`` holds the effective channels toward the tagged UE with the
    link axis second to last, e.g. (T, K+1, M) for one sample; the result
    drops the last two axes.
    """
    return link_gains(channels, beams)[..., 1:].sum(axis=-1)


def predicted_sinr(channels, beams: BeamformerSet, noise: float) -> np.ndarray:
    if noise <= 0:
        raise ValueError("Noise power must be positive")
    gains = link_gains(channels, beams)
    return gains[..., 0] / (gains[..., 1:].sum(axis=-1) + noise)


def user_sinrs(cross_channels, beams: BeamformerSet, noise: float) -> np.ndarray:
    """SINR of each served user.

    ``cross_channels[k, j]`` is transmitter k's effective channel toward
    user j; user j is served by transmitter j and interfered by all others.
    """
    if noise <= 0:
        raise ValueError("Noise power must be positive")
    h = np.asarray(cross_channels, dtype=complex)
    projections = np.einsum("kjm,km->kj", h.conj(), beams.weights)
    gains = beams.powers[:, None] * np.abs(projections) ** 2
    signal = np.diag(gains)
    interference = gains.sum(axis=0) - signal
    return signal / (interference + noise)
