from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import torch
import torch.nn as nn

from twinbeam.errors import UntrainedModelError
from twinbeam.predictor.features import FeatureLayout
from twinbeam.predictor.models import NormalizationStats, TrainingConfig, TrainingLog


def _mlp(inputs: int, hidden: int, outputs: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Linear(inputs, hidden),
        nn.Tanh(),
        nn.Linear(hidden, hidden),
        nn.Tanh(),
        nn.Linear(hidden, outputs),
    )


class Generator(nn.Module):
    """Maps conditioning and latent noise to a normalized trajectory tensor."""

    def __init__(self, cond_dim: int, latent_dim: int, hidden: int, out_dim: int, blockage_mask: np.ndarray):
        super().__init__()
        self.latent_dim = latent_dim
        self.net = _mlp(cond_dim + latent_dim, hidden, out_dim)
        self.register_buffer("blockage_mask", torch.as_tensor(blockage_mask, dtype=torch.bool))

    def forward(self, cond: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([cond, z], dim=-1))

    def emit(self, cond: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        """Output with the blockage columns squashed to probabilities."""
        raw = self.forward(cond, z)
        return torch.where(self.blockage_mask, torch.sigmoid(raw), raw)


class Discriminator(nn.Module):
    def __init__(self, cond_dim: int, hidden: int, target_dim: int):
        super().__init__()
        self.net = nn.Sequential(_mlp(cond_dim + target_dim, hidden, 1), nn.Sigmoid())

    def forward(self, cond: torch.Tensor, trajectory: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([cond, trajectory], dim=-1)).squeeze(-1)


@dataclass(eq=False)
class GenerativeModel:
    layout: FeatureLayout
    config: TrainingConfig
    generator: Generator
    discriminator: Discriminator
    cond_stats: NormalizationStats
    target_stats: NormalizationStats
    log: TrainingLog = field(default_factory=lambda: TrainingLog(rows=[]))
    trained: bool = False

    @classmethod
    def create(
        cls,
        layout: FeatureLayout,
        config: TrainingConfig,
        cond_stats: NormalizationStats,
        target_stats: NormalizationStats,
        seed: Optional[int] = None,
    ) -> "GenerativeModel":
        """Fresh networks; initialization is seeded without touching the
        global torch RNG."""
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(config.seed if seed is None else seed)
            generator = Generator(
                layout.cond_dim, config.latent_dim, config.hidden, layout.target_dim, layout.blockage_mask()
            ).double()
            discriminator = Discriminator(layout.cond_dim, config.hidden, layout.target_dim).double()
        return cls(
            layout=layout,
            config=config,
            generator=generator,
            discriminator=discriminator,
            cond_stats=cond_stats,
            target_stats=target_stats,
        )

    @property
    def latent_dim(self) -> int:
        return self.config.latent_dim

    def require_trained(self) -> None:
        if not self.trained:
            raise UntrainedModelError("Generative model has not been trained")

    def normalize_conditions(self, conditions: np.ndarray) -> torch.Tensor:
        return torch.as_tensor(self.cond_stats.apply(conditions), dtype=torch.float64)

    def normalize_targets(self, targets: np.ndarray) -> torch.Tensor:
        return torch.as_tensor(self.target_stats.apply(targets), dtype=torch.float64)

    def denormalize_targets(self, emitted: np.ndarray) -> np.ndarray:
        return self.target_stats.invert(emitted)
