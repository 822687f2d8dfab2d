"""Experiment configuration: defaults, YAML I/O and config hashing."""
import hashlib
import json
import logging
import os
from typing import List, Optional

import yaml

from twinbeam.beamform.models import OptimizerConfig
from twinbeam.channel.models import PathLossModel
from twinbeam.config.scene_file import load_scene_config
from twinbeam.config.settings import DEFAULT_SCENE_FILE
from twinbeam.dynamics.models import SimulationConfig
from twinbeam.harness.models import COMPARISON_SCHEMES, SchemeId
from twinbeam.predictor.models import TrainingConfig
from twinbeam.pydantic_compat import BaseModel, field_validator

logger = logging.getLogger(__name__)

# Fields that change where results go, not what they are
_UNHASHED_FIELDS = ("output_dir", "workers")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


class OptimizerSettings(BaseModel):
    max_iters: int = 50
    tol: float = 1e-6
    # None selects 1e-6 * trace(H H^H) / K per solve
    zf_delta: Optional[float] = None
    # Write the per-iteration objective next to each trace
    verbose: bool = False


class ExperimentConfig(BaseModel):
    scene_file: Optional[str] = None
    scene_seed: int = 0
    k_values: List[int] = [2, 4, 6, 8, 10, 12]
    dt: float = 1e-3
    horizon: int = 5
    history: int = 4
    samples: int = 10
    steps: int = 100
    v_max: float = 1.0
    mobility_sigma: float = 0.01
    noise_dbm: float = -80.0
    tx_power_dbm: float = 0.0
    gamma_min_db: float = 5.0
    eta: float = 0.01
    hotspot_intensity: float = 3.0
    bandwidth_hz: float = 400e6
    path_loss: PathLossModel = PathLossModel()
    optimizer: OptimizerSettings = OptimizerSettings()
    training: TrainingConfig = TrainingConfig()
    schemes: List[SchemeId] = list(COMPARISON_SCHEMES)
    seeds: List[int] = list(range(20))
    train_seeds: List[int] = [1000, 1001, 1002, 1003]
    include_oracle_in_figures: bool = False
    # None falls back to TWINBEAM_OUTPUT_DIR and TWINBEAM_WORKERS
    output_dir: Optional[str] = None
    workers: Optional[int] = None

    @field_validator("dt", "v_max", "bandwidth_hz")
    def _check_positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("horizon", "samples", "steps")
    def _check_count(cls, value):
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("history", "scene_seed")
    def _check_non_negative(cls, value):
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("eta")
    def _check_eta(cls, value):
        if not 0.0 < value <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        return value

    @field_validator("hotspot_intensity", "mobility_sigma")
    def _check_non_negative_float(cls, value):
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("k_values")
    def _check_k_values(cls, value):
        if not value or any(k < 1 for k in value):
            raise ValueError("k_values must list interferer counts >= 1")
        return value

    @property
    def noise_w(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    @property
    def tx_power_w(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def gamma_min(self) -> float:
        return db_to_linear(self.gamma_min_db)

    def resolved_scene_file(self) -> str:
        return self.scene_file or DEFAULT_SCENE_FILE

    def simulation(self) -> SimulationConfig:
        return SimulationConfig(
            dt=self.dt,
            v_max=self.v_max,
            mobility_sigma=self.mobility_sigma,
            history=self.history,
            horizon=self.horizon,
            steps=self.steps,
            hotspot_intensity=self.hotspot_intensity,
            path_loss=self.path_loss,
        )

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            gamma_min=self.gamma_min,
            noise_power=self.noise_w,
            max_iters=self.optimizer.max_iters,
            tol=self.optimizer.tol,
            zf_delta=self.optimizer.zf_delta,
            verbose=self.optimizer.verbose,
        )

    def quick(self, seeds: List[int], steps: int) -> "ExperimentConfig":
        """Single short run for CI; everything else is unchanged."""
        return self.model_copy(update={"seeds": list(seeds), "steps": steps})

    def to_plain(self) -> dict:
        return json.loads(self.model_dump_json())

    def config_hash(self) -> str:
        """SHA-256 of the canonical config with the scene file's validated
        content in place of its path.

        Raises:
            FileNotFoundError: If the scene file does not exist.
        """
        payload = self.to_plain()
        for field in _UNHASHED_FIELDS:
            payload.pop(field, None)
        payload.pop("scene_file", None)
        scene = load_scene_config(self.resolved_scene_file())
        payload["scene"] = json.loads(scene.model_dump_json())
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_experiment(path: Optional[str] = None) -> ExperimentConfig:
    """Loads an experiment file; no path means the built-in defaults."""
    if path is None:
        return ExperimentConfig()

    if not os.path.exists(path):
        raise FileNotFoundError(f"Experiment config not found: {path}")

    with open(path, "r") as f:
        raw = yaml.safe_load(f) or {}

    if not isinstance(raw, dict):
        raise ValueError(f"Experiment config {path} must contain a mapping")

    experiment = ExperimentConfig.model_validate(raw)
    logger.info("Loaded experiment config %s (hash %s)", path, experiment.config_hash()[:12])
    return experiment


def dump_experiment(experiment: ExperimentConfig, path: str) -> None:
    with open(path, "w") as f:
        f.write(dumps_experiment(experiment))


def dumps_experiment(experiment: ExperimentConfig) -> str:
    return yaml.safe_dump(experiment.to_plain(), sort_keys=False)
