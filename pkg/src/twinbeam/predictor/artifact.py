"""Versioned model artifact: a torch.save payload with a plain-data header."""
import logging
import os
import tempfile
from typing import Optional

import torch

from twinbeam.errors import ArtifactError
from twinbeam.predictor.features import FeatureLayout
from twinbeam.predictor.models import NormalizationStats, TrainingConfig, TrainingLog
from twinbeam.predictor.network import GenerativeModel
from twinbeam.version import get_version

logger = logging.getLogger(__name__)

MODEL_FORMAT = "twinbeam-cgan"
MODEL_VERSION = 1


def save_model(model: GenerativeModel, path: str, config_hash: Optional[str] = None) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "header": {
            "layout": model.layout.to_dict(),
            "training": model.config.model_dump(),
            "cond_stats": model.cond_stats.to_lists(),
            "target_stats": model.target_stats.to_lists(),
            "log": model.log.rows,
            "initial_val_loss_pred": model.log.initial_val_loss_pred,
            "trained": model.trained,
            "config_hash": config_hash,
            "twinbeam_version": get_version(),
        },
        "generator": model.generator.state_dict(),
        "discriminator": model.discriminator.state_dict(),
    }
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            torch.save(payload, f)
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info("Saved model to %s", path)


def load_model(path: str) -> GenerativeModel:
    """Reads a model artifact.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        ArtifactError: If the file is not a supported model artifact.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Model artifact not found: {path}")

    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise ArtifactError(f"Cannot read model artifact {path}: {exc}") from exc

    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ArtifactError(f"{path} is not a {MODEL_FORMAT} artifact")
    if payload.get("version") != MODEL_VERSION:
        raise ArtifactError(f"{path} has version {payload.get('version')}, expected {MODEL_VERSION}")

    header = payload["header"]
    model = GenerativeModel.create(
        FeatureLayout(**header["layout"]),
        TrainingConfig.model_validate(header["training"]),
        NormalizationStats.from_lists(header["cond_stats"]),
        NormalizationStats.from_lists(header["target_stats"]),
    )
    try:
        model.generator.load_state_dict(payload["generator"])
        model.discriminator.load_state_dict(payload["discriminator"])
    except RuntimeError as exc:
        raise ArtifactError(f"{path}: parameters do not match the header dimensions") from exc
    model.log = TrainingLog(rows=list(header["log"]), initial_val_loss_pred=header.get("initial_val_loss_pred"))
    model.trained = bool(header["trained"])
    return model


def artifact_config_hash(path: str):
    """Config hash recorded when the artifact was written, if any."""
    payload = torch.load(path, map_location="cpu", weights_only=True)
    return payload.get("header", {}).get("config_hash")
