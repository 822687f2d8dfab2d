"""Process-pool execution of (scheme, K, seed) simulation cells."""
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from datetime import datetime
from typing import Dict, Iterable, List, Optional

from twinbeam.config.experiment import ExperimentConfig
from twinbeam.harness.models import CellJob, JobStatus, PredictorKind, SchemeId, SweepSummary
from twinbeam.harness.pipeline import RunPaths
from twinbeam.harness.registry import get_scheme
from twinbeam.harness.simulation import run_cell, scenario, snapshots_for_run, write_cell
from twinbeam.services.logs import EventLog

logger = logging.getLogger(__name__)


def _run_group(payload: dict) -> List[dict]:
    """Runs every scheme of one (K, seed) on a shared scenario roll.

    Module level so the process pool can pickle it.
    """
    experiment = ExperimentConfig.model_validate(payload["experiment"])
    k, seed = payload["k"], payload["seed"]
    event_log = EventLog(payload.get("events"))

    config_hash = experiment.config_hash()
    scene, scene_config = scenario(experiment, k)
    snapshots = snapshots_for_run(experiment, scene, scene_config, seed)

    model = None
    outcomes = []
    for scheme, trace_path in payload["schemes"]:
        started = datetime.now().isoformat()
        try:
            if get_scheme(scheme).predictor == PredictorKind.GENERATIVE and model is None:
                from twinbeam.predictor.artifact import artifact_config_hash, load_model

                if payload.get("model"):
                    model = load_model(payload["model"])
                    trained_with = artifact_config_hash(payload["model"])
                    if trained_with not in (None, config_hash):
                        event_log.warning(
                            "runner",
                            "model",
                            f"Model {payload['model']} was trained under config {trained_with[:12]}",
                            metadata={"K": k, "seed": seed},
                            module="harness",
                        )
            result = run_cell(experiment, scheme, k, seed, model=model, scene_config=scene_config,
                              snapshots=snapshots, event_log=event_log)
            write_cell(result, trace_path, config_hash, experiment.horizon)
            outcomes.append({"scheme": scheme, "k": k, "seed": seed, "status": JobStatus.COMPLETED.value,
                             "trace_path": trace_path, "started_at": started})
        except Exception as exc:
            logger.exception("Cell %s K=%d seed=%d failed", scheme, k, seed)
            outcomes.append({"scheme": scheme, "k": k, "seed": seed, "status": JobStatus.FAILED.value,
                             "error": f"{type(exc).__name__}: {exc}", "started_at": started})
    return outcomes


def run_cells(
    experiment: ExperimentConfig,
    schemes: Iterable,
    k_values: Iterable[int],
    seeds: Iterable[int],
    paths: RunPaths,
    model_paths: Optional[Dict[int, str]] = None,
    workers: int = 1,
    event_log: Optional[EventLog] = None,
) -> SweepSummary:
    """Runs the cell grid; cells sharing (K, seed) share one scenario roll."""
    schemes = [SchemeId(s) for s in schemes]
    model_paths = model_paths or {}
    jobs = {
        (s.value, k, seed): CellJob(scheme=s, k=k, seed=seed, trace_path=paths.trace(s.value, k, seed))
        for k in k_values
        for seed in seeds
        for s in schemes
    }
    payloads = []
    for k in k_values:
        for seed in seeds:
            payloads.append(
                {
                    "experiment": experiment.to_plain(),
                    "k": k,
                    "seed": seed,
                    "model": model_paths.get(k),
                    "events": paths.events,
                    "schemes": [(s.value, jobs[(s.value, k, seed)].trace_path) for s in schemes],
                }
            )
    os.makedirs(paths.traces, exist_ok=True)

    def record(outcome: dict) -> None:
        job = jobs[(outcome["scheme"], outcome["k"], outcome["seed"])]
        job.status = JobStatus(outcome["status"])
        job.error = outcome.get("error")
        job.started_at = datetime.fromisoformat(outcome["started_at"])
        job.finished_at = datetime.now()
        if event_log is not None:
            level = event_log.info if job.status == JobStatus.COMPLETED else event_log.error
            level("runner", "cell", f"{job.key} {job.status.value}", metadata={"error": job.error}, module="harness")

    for job in jobs.values():
        job.status = JobStatus.RUNNING
    if workers <= 1:
        for payload in payloads:
            for outcome in _run_group(payload):
                record(outcome)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_group, payload) for payload in payloads]
            for future in as_completed(futures):
                for outcome in future.result():
                    record(outcome)

    summary = SweepSummary(jobs=list(jobs.values()))
    logger.info(
        "Cells: %d completed, %d failed",
        summary.count(JobStatus.COMPLETED),
        summary.count(JobStatus.FAILED),
    )
    return summary
