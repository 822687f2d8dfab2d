"""DT dataset construction and its on-disk table format.

A dataset directory holds ``dataset.npz`` (one row per sample, link and
tau; tau <= 0 are history rows, tau >= 1 target rows) and ``manifest.json``.
"""
import json
import logging
import os
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from twinbeam.beamform.interference import aggregate_interference
from twinbeam.beamform.reactive import reactive_beams
from twinbeam.config.scene_file import SceneConfig
from twinbeam.dynamics.environment import realize_environment
from twinbeam.dynamics.models import DtFeatures, DtSample, DtTargets, EnvironmentSnapshot, SimulationConfig
from twinbeam.errors import ArtifactError
from twinbeam.scene.models import Scene
from twinbeam.version import get_version

logger = logging.getLogger(__name__)

DATASET_FORMAT = "twinbeam-dataset"
DATASET_VERSION = 1
TABLE_FILE = "dataset.npz"
MANIFEST_FILE = "manifest.json"


def sample_steps(steps: int, history: int, horizon: int) -> range:
    """Decision steps with a full history window and a full horizon."""
    return range(history, steps - horizon)


def features_at(snapshots: Sequence[EnvironmentSnapshot], t: int, history: int, seed: int) -> DtFeatures:
    window = snapshots[t - history : t + 1]
    current = snapshots[t]
    return DtFeatures(
        t=t,
        seed=seed,
        history_channels=np.stack([s.tagged_matrix() for s in window]),
        history_positions=np.stack([s.position for s in window]),
        history_lambdas=np.stack([s.lambdas for s in window]),
        history_blockage=np.stack([s.blockage for s in window]),
        history_regimes=np.stack([s.regimes for s in window]),
        events=current.events(),
        hotspot_users=current.hotspot_users,
    )


def targets_at(snapshots: Sequence[EnvironmentSnapshot], t: int, horizon: int, beams) -> DtTargets:
    future = snapshots[t + 1 : t + 1 + horizon]
    channels = np.stack([s.tagged_matrix() for s in future])
    return DtTargets(
        channels=channels,
        lambdas=np.stack([s.lambdas for s in future]),
        blockage=np.stack([s.blockage for s in future]),
        regimes=np.stack([s.regimes for s in future]),
        positions=np.stack([s.position for s in future]),
        interference=aggregate_interference(channels, beams),
        beams=beams.weights,
        powers=beams.powers,
    )


def build_dataset(
    scene: Scene,
    scene_config: SceneConfig,
    sim: SimulationConfig,
    seed: int,
    snapshots: Optional[Sequence[EnvironmentSnapshot]] = None,
    zf_delta: Optional[float] = None,
) -> List[DtSample]:
    """Builds (X, Y) pairs from one seeded scenario roll.

    Targets come from the scenario's own continuation; the interference
    labels use the regime-aware reactive beams designed at t and held over
    the horizon.

    Raises:
        ValueError: If history plus horizon does not fit in ``sim.steps``.
    """
    steps = sim.steps
    windows = sample_steps(steps, sim.history, sim.horizon)
    if len(windows) < 1:
        raise ValueError(
            f"T_sim={steps} cannot hold T_h={sim.history} history steps and a horizon of {sim.horizon}"
        )
    if snapshots is None:
        snapshots = realize_environment(scene, scene_config, sim, seed, steps)
    if len(snapshots) < steps:
        raise ValueError(f"Need {steps} snapshots, got {len(snapshots)}")

    powers = np.array([tx.tx_power for tx in scene.transmitters])
    samples = []
    for t in windows:
        current = snapshots[t]
        beams = reactive_beams(
            current.tagged_matrix(), current.own_matrix(), current.regimes, powers, zf_delta=zf_delta
        )
        samples.append(
            DtSample(
                features=features_at(snapshots, t, sim.history, seed),
                targets=targets_at(snapshots, t, sim.horizon, beams),
            )
        )

    logger.info("Built %d samples for seed %d", len(samples), seed)
    return samples


def _table(samples: Sequence[DtSample]) -> dict:
    first = samples[0]
    links = first.features.history_channels.shape[1]
    history = first.features.history_length
    horizon = first.targets.horizon
    taus = np.arange(-(history - 1), horizon + 1)

    columns = {name: [] for name in (
        "sample", "seed", "t", "link", "tau", "channel_re", "channel_im", "lambda", "blockage",
        "regime", "position", "interference", "event_blockage", "event_hotspot", "hotspot_users",
    )}
    for index, sample in enumerate(samples):
        f, y = sample.features, sample.targets
        for tau in taus:
            for k in range(links):
                if tau <= 0:
                    row = history - 1 + tau
                    h = f.history_channels[row, k]
                    values = (f.history_lambdas[row, k], f.history_blockage[row, k], f.history_regimes[row, k])
                    position = f.history_positions[row]
                    interference = np.nan
                else:
                    h = y.channels[tau - 1, k]
                    values = (y.lambdas[tau - 1, k], y.blockage[tau - 1, k], y.regimes[tau - 1, k])
                    position = y.positions[tau - 1]
                    interference = y.interference[tau - 1]
                columns["sample"].append(index)
                columns["seed"].append(f.seed)
                columns["t"].append(f.t)
                columns["link"].append(k)
                columns["tau"].append(tau)
                columns["channel_re"].append(h.real)
                columns["channel_im"].append(h.imag)
                columns["lambda"].append(values[0])
                columns["blockage"].append(values[1])
                columns["regime"].append(values[2])
                columns["position"].append(position)
                columns["interference"].append(interference)
                columns["event_blockage"].append(bool(f.events[k, 0]))
                columns["event_hotspot"].append(bool(f.events[k, 1]))
                columns["hotspot_users"].append(f.hotspot_users)

    table = {name: np.asarray(values) for name, values in columns.items()}
    table["beam_re"] = np.stack([s.targets.beams.real for s in samples])
    table["beam_im"] = np.stack([s.targets.beams.imag for s in samples])
    table["power"] = np.stack([s.targets.powers for s in samples])
    return table


def save_dataset(samples: Sequence[DtSample], directory: str, config_hash: Optional[str] = None) -> dict:
    """Writes the table and its manifest; returns the manifest."""
    if not samples:
        raise ValueError("Cannot save an empty dataset")
    os.makedirs(directory, exist_ok=True)

    table = _table(samples)
    first = samples[0]
    manifest = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "seeds": sorted({int(s.features.seed) for s in samples}),
        "config_hash": config_hash,
        "interferers": int(first.features.history_channels.shape[1] - 1),
        "elements": int(first.features.history_channels.shape[2]),
        "history": int(first.features.history_length - 1),
        "horizon": int(first.targets.horizon),
        "samples": len(samples),
        "rows": int(table["sample"].shape[0]),
        "twinbeam_version": get_version(),
    }

    # Temporary names keep a half-written dataset from looking complete
    table_path = os.path.join(directory, TABLE_FILE)
    partial = table_path + ".partial.npz"
    np.savez_compressed(partial, **table)
    os.replace(partial, table_path)
    manifest_path = os.path.join(directory, MANIFEST_FILE)
    with open(manifest_path + ".partial", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    os.replace(manifest_path + ".partial", manifest_path)

    logger.info("Saved %d samples (%d rows) to %s", manifest["samples"], manifest["rows"], directory)
    return manifest


def read_manifest(directory: str) -> dict:
    path = os.path.join(directory, MANIFEST_FILE)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Dataset manifest not found: {path}")
    with open(path, "r") as f:
        manifest = json.load(f)
    if manifest.get("format") != DATASET_FORMAT or manifest.get("version") != DATASET_VERSION:
        raise ArtifactError(f"{path} is not a {DATASET_FORMAT} v{DATASET_VERSION} manifest")
    return manifest


def load_dataset(directory: str, config_hash: Optional[str] = None) -> Tuple[List[DtSample], dict]:
    """Reads a dataset back into samples.

    Raises:
        FileNotFoundError: If the table or manifest is missing.
        ArtifactError: If the manifest does not describe the table or its
            config hash differs from ``config_hash``.
    """
    manifest = read_manifest(directory)
    if config_hash is not None and manifest.get("config_hash") not in (None, config_hash):
        raise ArtifactError(
            f"Dataset {directory} was built with config {manifest['config_hash'][:12]}, expected {config_hash[:12]}"
        )

    path = os.path.join(directory, TABLE_FILE)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Dataset table not found: {path}")
    with np.load(path) as data:
        table = {name: data[name] for name in data.files}

    if table["sample"].shape[0] != manifest["rows"]:
        raise ArtifactError(f"Dataset {directory}: manifest lists {manifest['rows']} rows, table has {table['sample'].shape[0]}")

    links = manifest["interferers"] + 1
    history = manifest["history"] + 1
    horizon = manifest["horizon"]
    per_sample = links * (history + horizon)

    samples = []
    for index in range(manifest["samples"]):
        block = slice(index * per_sample, (index + 1) * per_sample)

        def grid(name, extra=()):
            values = table[name][block]
            return values.reshape((history + horizon, links) + tuple(extra))

        channels = grid("channel_re", (manifest["elements"],)) + 1j * grid("channel_im", (manifest["elements"],))
        lambdas = grid("lambda")
        blockage = grid("blockage")
        regimes = grid("regime").astype(int)
        positions = grid("position", (3,))[:, 0]
        interference = grid("interference")[:, 0]

        features = DtFeatures(
            t=int(table["t"][block.start]),
            seed=int(table["seed"][block.start]),
            history_channels=channels[:history],
            history_positions=positions[:history],
            history_lambdas=lambdas[:history],
            history_blockage=blockage[:history],
            history_regimes=regimes[:history],
            events=np.stack([grid("event_blockage")[0], grid("event_hotspot")[0]], axis=1),
            hotspot_users=int(table["hotspot_users"][block.start]),
        )
        targets = DtTargets(
            channels=channels[history:],
            lambdas=lambdas[history:],
            blockage=blockage[history:],
            regimes=regimes[history:],
            positions=positions[history:],
            interference=interference[history:],
            beams=table["beam_re"][index] + 1j * table["beam_im"][index],
            powers=table["power"][index],
        )
        samples.append(DtSample(features=features, targets=targets))

    logger.debug("Loaded %d samples from %s", len(samples), directory)
    return samples, manifest


def merge_samples(groups: Iterable[Sequence[DtSample]]) -> List[DtSample]:
    merged: List[DtSample] = []
    for group in groups:
        merged.extend(group)
    return merged
