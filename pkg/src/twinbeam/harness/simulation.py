"""Closed-loop run of one scheme on one seeded scenario."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from twinbeam.beamform.interference import aggregate_interference, predicted_sinr, user_sinrs
from twinbeam.beamform.optimizer import expected_interference, proactive_optimize
from twinbeam.beamform.reactive import reactive_beams
from twinbeam.config.experiment import ExperimentConfig
from twinbeam.config.scene_file import SceneConfig, load_scene_config
from twinbeam.dynamics.dataset import features_at
from twinbeam.dynamics.environment import far_field_view, realize_environment
from twinbeam.dynamics.models import EnvironmentSnapshot
from twinbeam.errors import ArtifactError, UntrainedModelError
from twinbeam.harness.models import PredictorKind, SchemeId
from twinbeam.harness.outputs import fmt, fmt_list, trace_columns, trace_header, write_csv
from twinbeam.harness.registry import get_scheme
from twinbeam.metrics.reductions import min_rate
from twinbeam.predictor.baselines import deterministic_dt_predict, hold_predict, oracle_predict
from twinbeam.scene.builder import build_scene
from twinbeam.scene.models import Scene

logger = logging.getLogger(__name__)

# Predicted and realized SINR further apart than this are reported
DISCREPANCY_DB = 3.0
_GENERATION_STREAM = 2


@dataclass
class CellResult:
    scheme: SchemeId
    k: int
    seed: int
    rows: List[Dict[str, str]]
    optimizer_rows: List[Dict[str, str]] = field(default_factory=list)


def scenario(experiment: ExperimentConfig, k: int, scene_config: Optional[SceneConfig] = None):
    """Scene and scene file for K interferers."""
    scene_config = scene_config or load_scene_config(experiment.resolved_scene_file())
    scene = build_scene(scene_config, k, experiment.scene_seed, experiment.eta, experiment.tx_power_w)
    return scene, scene_config


def snapshots_for_run(experiment: ExperimentConfig, scene: Scene, scene_config: SceneConfig, seed: int):
    """Every snapshot a run touches: history before the first decision and a
    full horizon after the last realized slot."""
    total = experiment.history + experiment.steps + experiment.horizon + 1
    return realize_environment(scene, scene_config, experiment.simulation(), seed, total)


def _predict(spec, experiment, scene, snapshots, t, reference, noise, model, rng, seed):
    snapshot = snapshots[t]
    horizon = experiment.horizon
    if spec.predictor == PredictorKind.DETERMINISTIC:
        return deterministic_dt_predict(
            scene,
            snapshot.mobility,
            horizon,
            experiment.dt,
            experiment.path_loss,
            reference,
            noise,
            t=t,
            regime_aware=spec.regime_aware,
        )
    if spec.predictor == PredictorKind.ORACLE:
        return oracle_predict(snapshots, t, horizon, reference, noise, scene.blockage_factor)

    from twinbeam.predictor.generation import conditioning_vector, generate_trajectories

    features = features_at(snapshots, t, experiment.history, seed)
    return generate_trajectories(
        model,
        conditioning_vector(model, features),
        scene,
        experiment.path_loss,
        reference,
        noise,
        experiment.samples,
        rng=rng,
        regime_aware=spec.regime_aware,
        t=t,
    )


def run_cell(
    experiment: ExperimentConfig,
    scheme,
    k: int,
    seed: int,
    model=None,
    scene_config: Optional[SceneConfig] = None,
    snapshots: Optional[Sequence[EnvironmentSnapshot]] = None,
    event_log=None,
) -> CellResult:
    """Runs T_sim decision steps of ``scheme``.

    At decision step t the scheme sees the twin up to t, predicts
    t+1..t+T and deploys beams for slot t+1. Each row records the realized
    SINR and interference of slot t+1, the predictions, and the interference
    the deployed beams would see if held over the horizon.

    Raises:
        UntrainedModelError: If a generative scheme gets no trained model.
        ArtifactError: If the model was trained for another K.
    """
    spec = get_scheme(scheme)
    if spec.predictor == PredictorKind.GENERATIVE:
        if model is None:
            raise UntrainedModelError(f"Scheme {spec.id.value} needs a trained model")
        model.require_trained()
        if model.layout.links != k + 1:
            raise ArtifactError(f"Model was trained for K={model.layout.links - 1}, run uses K={k}")

    scene, scene_config = scenario(experiment, k, scene_config)
    if snapshots is None:
        snapshots = snapshots_for_run(experiment, scene, scene_config, seed)

    powers = np.array([tx.tx_power for tx in scene.transmitters])
    noise = experiment.noise_w
    gamma_min = experiment.gamma_min
    horizon = experiment.horizon
    optimizer_config = experiment.optimizer_config()
    zf_delta = experiment.optimizer.zf_delta
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(_GENERATION_STREAM + 1)[_GENERATION_STREAM])

    rows: List[Dict[str, str]] = []
    optimizer_rows: List[Dict[str, str]] = []
    previous = None
    for step in range(experiment.steps):
        t = experiment.history + step
        snapshot = snapshots[t]
        view = snapshot if spec.regime_aware else far_field_view(scene, experiment.path_loss, snapshot)

        if not spec.proactive:
            beams = reactive_beams(
                view.tagged_matrix(), view.own_matrix(), view.regimes, powers, spec.regime_aware, zf_delta
            )
            bundle = hold_predict(snapshot, horizon, beams, noise, scene.blockage_factor)
            objective = expected_interference(bundle, beams)
            iterations = 0
            feasible = bool(np.all(bundle.sinr >= gamma_min))
        else:
            reference = previous
            if reference is None:
                reference = reactive_beams(snapshot.tagged_matrix(), snapshot.own_matrix(), snapshot.regimes, powers)
            bundle = _predict(spec, experiment, scene, snapshots, t, reference, noise, model, rng, seed)
            regimes = view.regimes if spec.regime_aware else np.zeros(scene.num_links, dtype=int)
            result = proactive_optimize(bundle, regimes, optimizer_config, view.own_matrix(), powers)
            beams = result.beams
            bundle = bundle.evaluated(beams, noise)
            objective, iterations, feasible = result.objective, result.iterations, result.feasible
            if optimizer_config.verbose:
                optimizer_rows.extend(
                    {"step": fmt(step), "iteration": fmt(r["iteration"]), "objective": fmt(r["objective"]),
                     "accepted": fmt(r["accepted"])}
                    for r in result.trace
                )

        future = np.stack([snapshots[t + tau].tagged_matrix() for tau in range(1, horizon + 1)])[None]
        held = aggregate_interference(future, beams)[0]
        realized = snapshots[t + 1]
        sinr = float(predicted_sinr(future, beams, noise)[0, 0])
        sinr_pred = float(bundle.mean_sinr()[0])
        per_user = user_sinrs(realized.cross_matrix(), beams, noise)

        if event_log is not None and sinr > 0 and sinr_pred > 0:
            gap_db = 10.0 * np.log10(sinr_pred / sinr)
            if abs(gap_db) > DISCREPANCY_DB:
                event_log.warning(
                    "simulator",
                    "sinr_feedback",
                    f"Predicted SINR off by {gap_db:.1f} dB",
                    metadata={"scheme": spec.id.value, "K": k, "seed": seed, "t": t + 1, "sinr": sinr, "sinr_pred": sinr_pred},
                    module="harness",
                )

        row = {
            "step": fmt(step),
            "t": fmt(t + 1),
            "sinr": fmt(sinr),
            "sinr_db": fmt(10.0 * np.log10(sinr)) if sinr > 0 else "-inf",
            "sinr_pred": fmt(sinr_pred),
            "interference": fmt(held[0]),
            "min_rate": fmt(min_rate(per_user)),
            "user_sinrs": fmt_list(per_user),
            "blockage": fmt_list(realized.blockage),
            "regimes": fmt_list(realized.regimes),
            "hotspot_users": fmt(realized.hotspot_users),
            "objective": fmt(objective),
            "iterations": fmt(iterations),
            "feasible": fmt(feasible),
        }
        predicted = bundle.mean_interference()
        for tau in range(1, horizon + 1):
            row[f"interference_pred_{tau}"] = fmt(predicted[tau - 1])
            row[f"interference_held_{tau}"] = fmt(held[tau - 1])
        rows.append(row)
        previous = beams

    logger.info("Ran %s K=%d seed=%d: %d steps", spec.id.value, k, seed, len(rows))
    return CellResult(scheme=spec.id, k=k, seed=seed, rows=rows, optimizer_rows=optimizer_rows)


def write_cell(result: CellResult, path: str, config_hash: str, horizon: int) -> None:
    comment = trace_header(config_hash, result.seed, result.scheme.value, result.k)
    write_csv(path, trace_columns(horizon), result.rows, comment=comment)
    if result.optimizer_rows:
        write_csv(
            path[: -len(".csv")] + ".optimizer.csv",
            ["step", "iteration", "objective", "accepted"],
            result.optimizer_rows,
            comment=comment,
        )
