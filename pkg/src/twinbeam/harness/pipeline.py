"""Dataset, training and simulation stages shared by the CLI commands."""
import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from twinbeam.config.experiment import ExperimentConfig, dump_experiment
from twinbeam.config.settings import config
from twinbeam.dynamics.dataset import build_dataset, load_dataset, merge_samples, save_dataset
from twinbeam.harness.outputs import fmt, trace_filename, write_csv
from twinbeam.harness.simulation import scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunPaths:
    root: str

    @property
    def traces(self) -> str:
        return os.path.join(self.root, "traces")

    @property
    def events(self) -> str:
        return os.path.join(self.root, config.event_log_name)

    @property
    def config_file(self) -> str:
        return os.path.join(self.root, "config.yaml")

    def dataset(self, k: int) -> str:
        return os.path.join(self.root, "datasets", f"K{k}")

    def model(self, k: int) -> str:
        return os.path.join(self.root, "models", f"model_K{k}.pt")

    def trace(self, scheme: str, k: int, seed: int) -> str:
        return os.path.join(self.traces, trace_filename(scheme, k, seed))


def record_config(experiment: ExperimentConfig, paths: RunPaths) -> None:
    os.makedirs(paths.root, exist_ok=True)
    dump_experiment(experiment, paths.config_file)


def make_dataset(experiment: ExperimentConfig, k: int, seeds: Iterable[int], directory: str) -> dict:
    """Builds the DT dataset of K interferers over ``seeds`` and saves it."""
    scene, scene_config = scenario(experiment, k)
    sim = experiment.simulation()
    groups = [
        build_dataset(scene, scene_config, sim, seed, zf_delta=experiment.optimizer.zf_delta) for seed in seeds
    ]
    return save_dataset(merge_samples(groups), directory, experiment.config_hash())


def training_log_path(model_path: str) -> str:
    root, _ = os.path.splitext(model_path)
    return root + ".log.csv"


def train_model(
    experiment: ExperimentConfig,
    dataset_dir: str,
    model_path: str,
    resume_path: Optional[str] = None,
    event_log=None,
):
    """Trains on a saved dataset, writes the artifact and its loss curve.

    Raises:
        ArtifactError: If the dataset manifest belongs to another config.
    """
    from twinbeam.predictor.artifact import load_model, save_model
    from twinbeam.predictor.training import LOG_COLUMNS, train_generative

    config_hash = experiment.config_hash()
    samples, manifest = load_dataset(dataset_dir, config_hash)
    resume = load_model(resume_path) if resume_path else None
    model = train_generative(samples, experiment.training, resume=resume, event_log=event_log)
    save_model(model, model_path, config_hash)

    rows = [{name: fmt(row[name]) for name in LOG_COLUMNS} for row in model.log.rows]
    seeds = ";".join(str(s) for s in manifest["seeds"])
    write_csv(training_log_path(model_path), LOG_COLUMNS, rows, comment=f"# config_hash={config_hash} seeds={seeds}")
    if event_log is not None:
        last = model.log.last()
        event_log.info(
            "trainer",
            "train",
            f"Trained model for K={manifest['interferers']}",
            metadata={
                "epochs": model.log.epochs,
                "loss_pred": last["loss_pred"],
                "val_loss_pred": last["val_loss_pred"],
                "initial_val_loss_pred": model.log.initial_val_loss_pred,
            },
            module="predictor",
        )
    return model


def model_paths_for(paths: RunPaths, k_values: Iterable[int], explicit: Optional[str] = None) -> Dict[int, str]:
    k_values = list(k_values)
    if explicit:
        return {k: explicit for k in k_values}
    return {k: paths.model(k) for k in k_values}


def default_schemes(experiment: ExperimentConfig, schemes: Optional[List[str]]) -> List[str]:
    if schemes:
        return list(schemes)
    return [s.value if hasattr(s, "value") else s for s in experiment.schemes]
