from dataclasses import dataclass

import numpy as np

from twinbeam.pydantic_compat import BaseModel, field_validator
from twinbeam.scene.models import Regime


class PathLossModel(BaseModel):
    """Excess distance-dependent loss C0 * (d / d_ref) ** -alpha.

    The defaults make it the identity on top of free-space attenuation.
    """

    c0: float = 1.0
    d_ref: float = 1.0
    alpha: float = 0.0

    @field_validator("c0", "d_ref")
    def _check_positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("alpha")
    def _check_alpha(cls, value):
        if value < 0:
            raise ValueError("alpha must be >= 0")
        return value


@dataclass(frozen=True, eq=False)
class NlosPath:
    scatterer: np.ndarray
    reflection: complex
    r_bs: float
    r_ue: float

    def __post_init__(self):
        if self.r_bs <= 0 or self.r_ue <= 0:
            raise ValueError("NLoS path distances must be positive")
        if abs(self.reflection) > 1.0:
            raise ValueError("Reflection coefficient exceeds unit magnitude")


@dataclass(frozen=True, eq=False)
class LinkChannel:
    """One transmitter-to-point channel.

    ``h`` is the unit-large-scale shape: the physical channel divided by
    sqrt(lambda_total), so ``h_eff = sqrt(lambda_total * blockage) * h``.
    """

    k: int
    regime: Regime
    blockage: float
    h: np.ndarray
    lambda_los: float
    lambda_nlos: float
    lambda_total: float
    h_eff: np.ndarray

    @property
    def gain(self) -> float:
        return float(np.vdot(self.h_eff, self.h_eff).real)
