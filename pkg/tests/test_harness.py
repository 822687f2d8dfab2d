import csv
import math
import os

import numpy as np
import pytest

from twinbeam.config.experiment import ExperimentConfig
from twinbeam.errors import ConfigHashMismatchError, UntrainedModelError
from twinbeam.harness.evaluation import FIGURES, evaluate_traces, list_traces, load_traces
from twinbeam.harness.models import JobStatus, PredictorKind, SchemeId
from twinbeam.harness.outputs import read_trace
from twinbeam.harness.pipeline import RunPaths, make_dataset, model_paths_for, train_model, training_log_path
from twinbeam.harness.registry import figure_schemes, get_scheme, needs_model
from twinbeam.harness.runner import run_cells
from twinbeam.harness.simulation import run_cell, scenario, snapshots_for_run
from twinbeam.predictor.artifact import load_model
from twinbeam.predictor.models import TrainingConfig

REACTIVE = ["reactive_zf", "reactive_hybrid"]


def read_figure(path):
    with open(path, newline="") as f:
        assert f.readline().startswith("# config_hash=")
        return list(csv.DictReader(f))


def test_registry():
    assert get_scheme("oracle").predictor == PredictorKind.ORACLE
    assert not get_scheme(SchemeId.REACTIVE_ZF).proactive
    assert needs_model(["reactive_zf", "genai_regime_aware_proposed"])
    assert not needs_model(REACTIVE)
    assert figure_schemes(["oracle", "reactive_zf"]) == [SchemeId.REACTIVE_ZF]
    assert SchemeId.ORACLE in figure_schemes(["oracle"], include_oracle=True)
    with pytest.raises(ValueError, match="Unknown scheme"):
        get_scheme("magic")


def test_oracle_prediction_matches_realized(tiny_experiment):
    experiment = tiny_experiment.model_copy(update={"steps": 6})
    for seed in range(5):
        result = run_cell(experiment, "oracle", 2, seed)
        assert len(result.rows) == 6
        for row in result.rows:
            assert row["sinr_pred"] == row["sinr"]
            for tau in (1, 2):
                assert row[f"interference_pred_{tau}"] == row[f"interference_held_{tau}"]


def test_rows_follow_the_scenario(tiny_experiment):
    experiment = tiny_experiment.model_copy(update={"steps": 4})
    scene, scene_config = scenario(experiment, 2)
    snapshots = snapshots_for_run(experiment, scene, scene_config, 0)
    assert len(snapshots) == experiment.history + experiment.steps + experiment.horizon + 1
    result = run_cell(experiment, "reactive_hybrid", 2, 0, scene_config=scene_config, snapshots=snapshots)
    assert [int(row["t"]) for row in result.rows] == [3, 4, 5, 6]
    assert all(float(row["min_rate"]) >= 0 for row in result.rows)
    assert all(row["iterations"] == "0" for row in result.rows)


def test_generative_scheme_without_model(tiny_experiment):
    with pytest.raises(UntrainedModelError):
        run_cell(tiny_experiment, "genai_regime_aware_proposed", 2, 0)


def test_run_cells_is_deterministic(tiny_experiment, tmp_path):
    contents = []
    for name in ("a", "b"):
        paths = RunPaths(str(tmp_path / name))
        summary = run_cells(tiny_experiment, REACTIVE + ["dt_deterministic"], [2], [0], paths)
        assert summary.count(JobStatus.COMPLETED) == 3
        contents.append({os.path.basename(p): open(p).read() for p in list_traces(paths.traces)})
    assert contents[0] == contents[1]
    assert sorted(contents[0]) == [
        "dt_deterministic_K2_seed0.csv",
        "reactive_hybrid_K2_seed0.csv",
        "reactive_zf_K2_seed0.csv",
    ]


def test_failed_cells_are_reported(tiny_experiment, tmp_path):
    paths = RunPaths(str(tmp_path / "run"))
    summary = run_cells(tiny_experiment, ["reactive_zf", "genai_regime_unaware"], [2], [0, 1], paths)
    assert len(summary.jobs) == 4
    assert summary.count(JobStatus.COMPLETED) == 2
    failed = [job for job in summary.jobs if job.status == JobStatus.FAILED]
    assert {job.scheme for job in failed} == {SchemeId.GENAI_REGIME_UNAWARE}
    assert all("UntrainedModelError" in job.error for job in failed)


def test_evaluate_traces_writes_figures(tiny_experiment, tmp_path):
    paths = RunPaths(str(tmp_path / "run"))
    run_cells(tiny_experiment, REACTIVE + ["oracle"], [2], [0, 1], paths)
    outputs = evaluate_traces(paths.traces, paths.root, tiny_experiment.bandwidth_hz,
                              expected_hash=tiny_experiment.config_hash())

    assert set(outputs) == set(FIGURES) | {"aggregate"}
    by_k = read_figure(outputs["interference_vs_k"])
    assert sorted((row["scheme"], row["K"]) for row in by_k) == [("reactive_hybrid", "2"), ("reactive_zf", "2")]
    assert [row["reduction_gain_db"] for row in by_k if row["scheme"] == "reactive_zf"] == ["0.0"]

    aggregate = read_figure(outputs["aggregate"])
    assert {row["scheme"] for row in aggregate} == {"reactive_zf", "reactive_hybrid", "oracle"}
    oracle = [row for row in aggregate if row["scheme"] == "oracle"][0]
    assert float(oracle["rmse_w"]) == 0.0
    assert os.path.exists(os.path.join(paths.root, "reports", "reactive_zf_K2_seed1.csv"))

    rmse = read_figure(outputs["rmse_vs_horizon"])
    assert [row["tau"] for row in rmse if row["scheme"] == "reactive_zf"] == ["1", "2"]

    with_oracle = evaluate_traces(paths.traces, str(tmp_path / "again"), tiny_experiment.bandwidth_hz,
                                  include_oracle=True)
    assert "oracle" in {row["scheme"] for row in read_figure(with_oracle["interference_vs_k"])}


def test_evaluation_is_repeatable(tiny_experiment, tmp_path):
    paths = RunPaths(str(tmp_path / "run"))
    run_cells(tiny_experiment, ["reactive_zf"], [2], [0], paths)
    first = evaluate_traces(paths.traces, str(tmp_path / "one"), 1e8)
    second = evaluate_traces(paths.traces, str(tmp_path / "two"), 1e8)
    assert len(os.listdir(tmp_path / "one" / "figures")) == 6
    for name in FIGURES:
        assert open(first[name]).read() == open(second[name]).read()


def test_mixed_configurations_are_rejected(tiny_experiment, tmp_path):
    paths = RunPaths(str(tmp_path / "run"))
    run_cells(tiny_experiment, ["reactive_zf"], [2], [0], paths)
    with pytest.raises(ConfigHashMismatchError):
        load_traces(paths.traces, expected_hash="0" * 64)

    changed = tiny_experiment.model_copy(update={"eta": 0.05})
    run_cells(changed, ["reactive_zf"], [2], [1], paths)
    with pytest.raises(ConfigHashMismatchError):
        evaluate_traces(paths.traces, paths.root, 1e8)


def test_evaluate_empty_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        evaluate_traces(str(tmp_path), str(tmp_path / "out"), 1e8)


def test_verbose_optimizer_trace_is_kept_apart(tiny_experiment, tmp_path):
    experiment = tiny_experiment.model_copy(update={"optimizer": {"verbose": True, "max_iters": 3}, "steps": 3})
    paths = RunPaths(str(tmp_path / "run"))
    run_cells(experiment, ["dt_deterministic"], [2], [0], paths)
    trace = paths.trace("dt_deterministic", 2, 0)
    assert os.path.exists(trace[: -len(".csv")] + ".optimizer.csv")
    assert list_traces(paths.traces) == [trace]
    assert read_trace(trace).scheme == "dt_deterministic"


def test_dataset_training_and_generative_cell(tiny_experiment, tmp_path):
    paths = RunPaths(str(tmp_path / "run"))
    manifest = make_dataset(tiny_experiment, 2, tiny_experiment.train_seeds, paths.dataset(2))
    assert manifest["seeds"] == [5]
    assert manifest["interferers"] == 2

    model = train_model(tiny_experiment, paths.dataset(2), paths.model(2))
    assert model.log.epochs == 3
    assert os.path.exists(training_log_path(paths.model(2)))
    assert model_paths_for(paths, [2]) == {2: paths.model(2)}

    experiment = tiny_experiment.model_copy(update={"steps": 3})
    result = run_cell(experiment, "genai_regime_aware_proposed", 2, 0, model=load_model(paths.model(2)))
    assert len(result.rows) == 3
    assert all(np.isfinite(float(row["sinr_pred"])) for row in result.rows)


def test_sweep_emits_one_trace_per_cell(tiny_experiment, tmp_path):
    experiment = tiny_experiment.model_copy(update={"steps": 2})
    paths = RunPaths(str(tmp_path / "run"))
    summary = run_cells(experiment, REACTIVE, [1, 2, 3], [0, 1], paths)
    assert summary.count(JobStatus.COMPLETED) == 3 * 2 * 2
    assert len(list_traces(paths.traces)) == 12
    assert {read_trace(p).k for p in list_traces(paths.traces)} == {1, 2, 3}


def test_default_configuration_trains_without_diverging(tmp_path):
    experiment = ExperimentConfig(training=TrainingConfig(epochs=40), output_dir=str(tmp_path))
    paths = RunPaths(str(tmp_path))
    make_dataset(experiment, 2, experiment.train_seeds, paths.dataset(2))

    model = train_model(experiment, paths.dataset(2), paths.model(2))
    assert model.log.epochs == 40
    assert all(math.isfinite(row["loss_pred"]) and math.isfinite(row["loss_d"]) for row in model.log.rows)
    assert model.log.last()["val_loss_pred"] < model.log.initial_val_loss_pred
