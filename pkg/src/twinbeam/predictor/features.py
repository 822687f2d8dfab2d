"""Flat conditioning and trajectory tensors for the generative predictor."""
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from twinbeam.dynamics.models import DtFeatures, DtSample, DtTargets

INTERFERENCE_FLOOR = 1e-30


def element_subset(num_elements: int, count: int) -> np.ndarray:
    """Evenly spaced element indices used for the channel history."""
    count = min(count, num_elements)
    return np.unique(np.round(np.linspace(0, num_elements - 1, count)).astype(int))


@dataclass(frozen=True)
class FeatureLayout:
    links: int
    history: int
    horizon: int
    elements: int
    history_elements: int

    @property
    def subset(self) -> np.ndarray:
        return element_subset(self.elements, self.history_elements)

    @property
    def cond_dim(self) -> int:
        channel = self.history * self.links * len(self.subset) * 2
        positions = self.history * 3 + 3
        flags = self.links * 4 + 1
        return channel + positions + flags

    @property
    def step_dim(self) -> int:
        return 3 + 2 * self.links + 1

    @property
    def target_dim(self) -> int:
        return self.horizon * self.step_dim

    def offset_columns(self) -> np.ndarray:
        return self._columns(0, 3)

    def lambda_columns(self) -> np.ndarray:
        return self._columns(3, 3 + self.links)

    def blockage_columns(self) -> np.ndarray:
        return self._columns(3 + self.links, 3 + 2 * self.links)

    def interference_columns(self) -> np.ndarray:
        return self._columns(self.step_dim - 1, self.step_dim)

    def blockage_mask(self) -> np.ndarray:
        mask = np.zeros(self.target_dim, dtype=bool)
        mask[self.blockage_columns()] = True
        return mask

    def _columns(self, start: int, stop: int) -> np.ndarray:
        return np.concatenate([np.arange(start, stop) + tau * self.step_dim for tau in range(self.horizon)])

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_sample(cls, sample: DtSample, history_elements: int) -> "FeatureLayout":
        channels = sample.features.history_channels
        return cls(
            links=channels.shape[1],
            history=channels.shape[0],
            horizon=sample.targets.horizon,
            elements=channels.shape[2],
            history_elements=history_elements,
        )


def conditioning_raw(features: DtFeatures, layout: FeatureLayout) -> np.ndarray:
    if features.history_channels.shape != (layout.history, layout.links, layout.elements):
        raise ValueError(
            f"History shaped {features.history_channels.shape}, model expects "
            f"{(layout.history, layout.links, layout.elements)}"
        )
    history = features.history_channels[:, :, layout.subset]
    channel = np.stack([history.real, history.imag], axis=-1).ravel()
    offsets = (features.history_positions - features.position).ravel()
    return np.concatenate(
        [
            channel,
            offsets,
            features.position,
            features.regimes.astype(float),
            (features.blockage >= 1.0).astype(float),
            features.events.astype(float).ravel(),
            [float(features.hotspot_users)],
        ]
    )


def target_raw(targets: DtTargets, position: np.ndarray) -> np.ndarray:
    """Per tau: UE offset, log10 Lambda per link, clear-LoS probability per
    link and log10 of the aggregate interference."""
    offsets = targets.positions - position
    log_lambda = np.log10(targets.lambdas)
    clear = (targets.blockage >= 1.0).astype(float)
    log_interference = np.log10(targets.interference + INTERFERENCE_FLOOR)[:, None]
    return np.concatenate([offsets, log_lambda, clear, log_interference], axis=1).ravel()


def stack_samples(samples: Sequence[DtSample], layout: FeatureLayout):
    conditions = np.stack([conditioning_raw(s.features, layout) for s in samples])
    targets = np.stack([target_raw(s.targets, s.features.position) for s in samples])
    return conditions, targets
