import math

import numpy as np
import pytest
import torch

from twinbeam.beamform.models import BeamformerSet
from twinbeam.channel.models import PathLossModel
from twinbeam.config.scene_file import SceneConfig
from twinbeam.dynamics.dataset import build_dataset
from twinbeam.dynamics.environment import realize_environment
from twinbeam.dynamics.models import SimulationConfig
from twinbeam.errors import ArtifactError, UntrainedModelError
from twinbeam.predictor.artifact import load_model, save_model
from twinbeam.predictor.baselines import deterministic_dt_predict, hold_predict, oracle_predict
from twinbeam.predictor.evaluation import prediction_rmse
from twinbeam.predictor.features import FeatureLayout, element_subset, stack_samples
from twinbeam.predictor.generation import conditioning_vector, generate_trajectories
from twinbeam.predictor.models import ConditioningVector, NormalizationStats, TrainingConfig, TrajectoryBundle
from twinbeam.predictor.network import GenerativeModel, Generator
from twinbeam.predictor.training import (
    LOG_COLUMNS,
    adversarial_value,
    prediction_loss,
    split_by_time,
    train_generative,
    validation_loss,
)
from twinbeam.scene.builder import build_scene

SIM = SimulationConfig(steps=12, history=2, horizon=2)
NOISE = 1e-11


def tiny_config(**overrides):
    values = dict(epochs=2, batch_size=4, latent_dim=4, hidden=8, history_elements=4, validation_fraction=0.25)
    values.update(overrides)
    return TrainingConfig(**values)


@pytest.fixture
def samples(small_scene, small_scene_config):
    return build_dataset(small_scene, small_scene_config, SIM, seed=5)


def reference_beams(sample):
    return BeamformerSet(weights=sample.targets.beams, powers=sample.targets.powers)


def test_prediction_loss_vanishes_on_targets(samples):
    layout = FeatureLayout.from_sample(samples[0], 4)
    _, targets = stack_samples(samples, layout)
    target = torch.as_tensor(targets, dtype=torch.float64)
    assert float(prediction_loss(target, target, layout, mu=1.0)) == 0.0


def test_prediction_loss_weights_interference_by_mu():
    layout = FeatureLayout(links=1, history=1, horizon=1, elements=1, history_elements=1)
    target = torch.zeros(1, layout.target_dim, dtype=torch.float64)
    emitted = target.clone()
    emitted[0, layout.interference_columns()[0]] = 2.0
    # Six target columns: offset (3), Lambda, blockage, interference
    assert float(prediction_loss(emitted, target, layout, mu=0.5)) == pytest.approx(2.0 / 6)
    emitted[0, 0] = 1.0
    assert float(prediction_loss(emitted, target, layout, mu=0.5)) == pytest.approx(3.0 / 6)


def test_adversarial_value_at_constant_half():
    half = torch.full((5,), 0.5, dtype=torch.float64)
    assert float(adversarial_value(half, half)) == pytest.approx(2.0 * math.log(0.5))


def test_generator_gradient_matches_finite_differences():
    layout = FeatureLayout(links=1, history=1, horizon=1, elements=1, history_elements=1)
    torch.manual_seed(0)
    generator = Generator(1, 1, 1, layout.target_dim, layout.blockage_mask()).double()
    names = [name for name, _ in generator.named_parameters()]
    params = tuple(p.detach().clone().requires_grad_(True) for p in generator.parameters())
    cond = torch.tensor([[0.3], [-0.7]], dtype=torch.float64)
    z = torch.tensor([[0.1], [0.5]], dtype=torch.float64)
    target = torch.randn(2, layout.target_dim, dtype=torch.float64)

    def loss(*values):
        raw = torch.func.functional_call(generator, dict(zip(names, values)), (cond, z))
        emitted = torch.where(generator.blockage_mask, torch.sigmoid(raw), raw)
        return prediction_loss(emitted, target, layout, mu=1.0)

    assert torch.autograd.gradcheck(loss, params, eps=1e-6, atol=1e-8, rtol=1e-4)


def test_normalization_keeps_constant_columns():
    data = np.array([[1.0, 5.0], [3.0, 5.0]])
    stats = NormalizationStats.fit(data)
    assert stats.std.tolist() == [1.0, 1.0]
    assert np.allclose(stats.invert(stats.apply(data)), data)


def test_element_subset_is_evenly_spaced():
    assert element_subset(16, 4).tolist() == [0, 5, 10, 15]
    assert element_subset(3, 8).tolist() == [0, 1, 2]


def test_split_holds_out_last_seeds(small_scene, small_scene_config):
    short = SimulationConfig(steps=6, history=2, horizon=2)
    groups = [build_dataset(small_scene, small_scene_config, short, seed=s) for s in (1, 2, 3, 4)]
    merged = [s for group in groups for s in group]
    train, validation = split_by_time(merged, 0.25)
    assert {s.features.seed for s in validation} == {4}
    assert {s.features.seed for s in train} == {1, 2, 3}


def test_split_purges_overlapping_steps(samples):
    train, validation = split_by_time(samples, 0.25)
    assert [s.features.t for s in validation] == [8, 9]
    assert [s.features.t for s in train] == [2, 3]


def test_split_without_room_for_training(samples):
    with pytest.raises(ValueError, match="no training data"):
        split_by_time(samples, 0.9)


def test_training_log_has_one_row_per_epoch(samples):
    model = train_generative(samples, tiny_config(epochs=3))
    assert model.trained
    assert model.log.epochs == 3
    assert [row["epoch"] for row in model.log.rows] == [1, 2, 3]
    assert set(model.log.rows[0]) == set(LOG_COLUMNS)
    assert all(math.isfinite(row["val_loss_pred"]) for row in model.log.rows)


def test_training_is_deterministic(samples):
    a = train_generative(samples, tiny_config())
    b = train_generative(samples, tiny_config())
    assert a.log.rows == b.log.rows


def test_zero_lambda_pred_leaves_consistency_out_of_gradient(samples):
    model = train_generative(samples, tiny_config(lambda_pred=0.0))
    assert all(row["grad_norm_pred"] == 0.0 for row in model.log.rows)
    assert all(row["loss_pred"] > 0.0 for row in model.log.rows)
    weighted = train_generative(samples, tiny_config())
    assert all(row["grad_norm_pred"] > 0.0 for row in weighted.log.rows)


def test_resume_continues_epochs(tmp_path, samples):
    first = train_generative(samples, tiny_config())
    path = str(tmp_path / "model.pt")
    save_model(first, path, "hash")
    resumed = train_generative(samples, tiny_config(), resume=load_model(path))
    assert [row["epoch"] for row in resumed.log.rows] == [1, 2, 3, 4]
    assert resumed.log.rows[:2] == first.log.rows
    assert resumed.log.initial_val_loss_pred == first.log.initial_val_loss_pred
    typical = abs(first.log.rows[1]["loss_pred"] - first.log.rows[0]["loss_pred"])
    jump = abs(resumed.log.rows[2]["loss_pred"] - resumed.log.rows[1]["loss_pred"])
    assert jump <= max(2.0 * typical, 0.5 * first.log.rows[1]["loss_pred"])


def test_train_on_empty_dataset():
    with pytest.raises(ValueError):
        train_generative([], tiny_config())


def test_validation_loss_improves_on_a_generated_scenario(small_scene, small_scene_config):
    sim = SimulationConfig(steps=30, history=2, horizon=2)
    samples = [s for seed in (1, 2, 3, 4) for s in build_dataset(small_scene, small_scene_config, sim, seed=seed)]
    config = TrainingConfig(epochs=80, batch_size=16, latent_dim=4, hidden=32, history_elements=4, validation_fraction=0.25)
    model = train_generative(samples, config)

    initial = model.log.initial_val_loss_pred
    assert math.isfinite(initial)
    assert all(math.isfinite(row["loss_pred"]) for row in model.log.rows)
    assert model.log.last()["val_loss_pred"] < initial


def test_sgd_remains_available(samples):
    model = train_generative(samples, tiny_config(optimizer="SGD", learning_rate=1e-3, momentum=0.5))
    assert model.config.optimizer == "sgd"
    assert all(math.isfinite(row["loss_pred"]) for row in model.log.rows)


@pytest.mark.parametrize("overrides", [{"optimizer": "rmsprop"}, {"beta1": 1.0}, {"grad_clip": -1.0}])
def test_invalid_training_config(overrides):
    with pytest.raises(ValueError):
        tiny_config(**overrides)


def test_artifact_round_trip(tmp_path, samples):
    model = train_generative(samples, tiny_config())
    path = str(tmp_path / "models" / "model_K2.pt")
    save_model(model, path, "abc")
    restored = load_model(path)

    assert restored.trained
    assert restored.layout == model.layout
    assert restored.log.rows == model.log.rows
    assert restored.log.initial_val_loss_pred == model.log.initial_val_loss_pred
    assert validation_loss(samples, restored) == validation_loss(samples, model)


def test_load_model_rejects_foreign_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(str(tmp_path / "missing.pt"))
    path = tmp_path / "other.pt"
    torch.save({"format": "something-else"}, str(path))
    with pytest.raises(ArtifactError):
        load_model(str(path))
    path.write_bytes(b"not a torch file")
    with pytest.raises(ArtifactError):
        load_model(str(path))


def test_generation_requires_training(samples, small_scene):
    layout = FeatureLayout.from_sample(samples[0], 4)
    conditions, targets = stack_samples(samples, layout)
    model = GenerativeModel.create(layout, tiny_config(), NormalizationStats.fit(conditions), NormalizationStats.fit(targets))
    with pytest.raises(UntrainedModelError):
        generate_trajectories(
            model, conditioning_vector(model, samples[0].features), small_scene, PathLossModel(),
            reference_beams(samples[0]), NOISE, 2, rng=np.random.default_rng(0),
        )


def test_generated_bundle(samples, small_scene):
    model = train_generative(samples, tiny_config())
    sample = samples[0]
    conditioning = conditioning_vector(model, sample.features)
    bundle = generate_trajectories(
        model, conditioning, small_scene, PathLossModel(), reference_beams(sample), NOISE, 3,
        rng=np.random.default_rng(0), t=sample.features.t,
    )
    assert bundle.channels.shape == (3, 2, 3, 16)
    assert set(np.unique(bundle.blockage)) <= {1.0, small_scene.blockage_factor}
    assert np.all(bundle.positions >= small_scene.room.lower)
    assert np.all(bundle.positions <= small_scene.room.upper)
    assert np.all(bundle.interference >= 0)

    unaware = generate_trajectories(
        model, conditioning, small_scene, PathLossModel(), reference_beams(sample), NOISE, 3,
        rng=np.random.default_rng(0), regime_aware=False,
    )
    assert np.all(unaware.regimes == 0)

    with pytest.raises(ValueError):
        generate_trajectories(model, conditioning, small_scene, PathLossModel(), reference_beams(sample), NOISE, 0,
                              rng=np.random.default_rng(0))


def test_fixed_latents_reproduce_the_bundle(samples, small_scene):
    model = train_generative(samples, tiny_config())
    conditioning = conditioning_vector(model, samples[1].features)
    latents = np.random.default_rng(3).standard_normal((2, model.latent_dim))
    args = (model, conditioning, small_scene, PathLossModel(), reference_beams(samples[1]), NOISE, 2)
    a = generate_trajectories(*args, latents=latents)
    b = generate_trajectories(*args, latents=latents)
    assert np.array_equal(a.channels, b.channels)


def test_generation_rejects_foreign_conditioning(samples, small_scene):
    model = train_generative(samples, tiny_config())
    conditioning = conditioning_vector(model, samples[0].features)
    short = ConditioningVector(
        values=conditioning.values[:-1],
        position=conditioning.position,
        regimes=conditioning.regimes,
        blockage=conditioning.blockage,
    )
    with pytest.raises(ValueError, match="Conditioning"):
        generate_trajectories(model, short, small_scene, PathLossModel(), reference_beams(samples[0]), NOISE, 2,
                              rng=np.random.default_rng(0))


def test_generated_blockage_matches_a_frozen_scene(small_scene_config):
    # Static UE behind the obstacle as seen from interferer 2
    raw = small_scene_config.model_dump()
    raw["ue"] = {"start": [1.0, 1.5, 1.0], "heading": [1.0, 0.0, 0.0]}
    frozen = SceneConfig.model_validate(raw)
    scene = build_scene(frozen, 2, scene_seed=0)
    sim = SimulationConfig(steps=12, history=2, horizon=2, v_max=0.0, mobility_sigma=0.0, hotspot_intensity=0.0)
    samples = build_dataset(scene, frozen, sim, seed=5)
    truth = samples[0].targets.blockage
    assert truth[0].tolist() == [1.0, 1.0, scene.blockage_factor]

    config = tiny_config(epochs=150, batch_size=8, hidden=16, learning_rate=1e-2, validation_fraction=0.0)
    model = train_generative(samples, config)
    bundle = generate_trajectories(
        model, conditioning_vector(model, samples[0].features), scene, PathLossModel(),
        reference_beams(samples[0]), NOISE, 100, rng=np.random.default_rng(0),
    )
    assert np.all(np.abs(bundle.blockage.mean(axis=0) - truth) <= 0.05)


def test_bundle_blockage_takes_one_of_two_values(rng):
    shape = (1, 2, 3)
    channels = rng.normal(size=shape + (4,)) + 1j * rng.normal(size=shape + (4,))
    beams = BeamformerSet(weights=np.eye(3, 4), powers=np.full(3, 1e-3))
    common = dict(t=0, channels=channels, lambdas=np.ones(shape), regimes=np.zeros(shape, dtype=int),
                  positions=np.zeros((1, 2, 3)), beams=beams, noise=NOISE)

    TrajectoryBundle.assemble(blockage=np.full(shape, 0.01), blockage_factor=0.01, **common)
    with pytest.raises(ValueError, match="1 or 0.01"):
        TrajectoryBundle.assemble(blockage=np.full(shape, 0.5), blockage_factor=0.01, **common)
    with pytest.raises(ValueError):
        TrajectoryBundle.assemble(blockage=np.zeros(shape), **common)


def test_oracle_and_hold_predictors(small_scene, small_scene_config, samples):
    snapshots = realize_environment(small_scene, small_scene_config, SimulationConfig(steps=6), seed=0)
    beams = reference_beams(samples[0])
    oracle = oracle_predict(snapshots, 2, 3, beams, NOISE)
    assert oracle.num_samples == 1
    assert np.array_equal(oracle.channels[0, 1], snapshots[4].tagged_matrix())
    with pytest.raises(ValueError):
        oracle_predict(snapshots, 4, 3, beams, NOISE)

    held = hold_predict(snapshots[2], 3, beams, NOISE)
    assert np.array_equal(held.channels[0, 2], snapshots[2].tagged_matrix())
    assert np.allclose(held.interference[0], held.interference[0, 0])


def test_deterministic_dt_prediction_follows_velocity(small_scene, small_scene_config, samples):
    snapshot = realize_environment(small_scene, small_scene_config, SimulationConfig(steps=1), seed=0)[0]
    bundle = deterministic_dt_predict(
        small_scene, snapshot.mobility, 3, 1e-3, PathLossModel(), reference_beams(samples[0]), NOISE
    )
    assert bundle.channels.shape == (1, 3, 3, 16)
    expected = snapshot.position + 3 * 1e-3 * snapshot.mobility.velocity
    assert np.allclose(bundle.positions[0, -1], expected)


def test_prediction_rmse():
    realized = np.array([[1.0, 2.0], [3.0, 4.0]])
    per_tau, overall = prediction_rmse(realized, realized)
    assert per_tau.tolist() == [0.0, 0.0] and overall == 0.0
    per_tau, overall = prediction_rmse(realized + np.array([[1.0, 0.0], [1.0, 2.0]]), realized)
    assert per_tau.tolist() == pytest.approx([1.0, math.sqrt(2.0)])
    assert overall == pytest.approx(math.sqrt(1.5))
    with pytest.raises(ValueError):
        prediction_rmse(realized, realized[:, :1])
