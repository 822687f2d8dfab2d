import numpy as np
import pytest
import yaml

from twinbeam.config.experiment import ExperimentConfig
from twinbeam.config.scene_file import SceneConfig
from twinbeam.predictor.models import TrainingConfig
from twinbeam.scene.builder import build_scene


def small_scene_dict():
    """6 m x 6 m room, 4x4 arrays, three interferers with desk users."""
    return {
        "carrier_frequency": 100.0e9,
        "room": {"lower": [0.0, 0.0, 0.0], "upper": [6.0, 6.0, 3.0]},
        "array": {"nx": 4, "ny": 4},
        "far_field_model": "planar",
        "paths_per_link": 3,
        "serving": {"center": [3.0, 3.0, 2.5]},
        "interferers": [
            {"center": [1.5, 1.5, 2.5], "home_user": [2.0, 2.0, 1.2]},
            {"center": [4.5, 1.5, 2.5], "home_user": [5.0, 2.0, 1.2]},
            {"center": [1.5, 4.5, 2.5], "home_user": [2.0, 5.0, 1.2]},
        ],
        "obstacles": [{"lower": [2.0, 1.0, 0.0], "upper": [2.5, 2.0, 1.8]}],
        "hotspots": [
            {
                "region": {"lower": [3.5, 1.0, 1.0], "upper": [4.0, 1.5, 1.4]},
                "active_from": 3,
                "active_until": 8,
            }
        ],
        "ue": {"start": [1.0, 3.0, 1.5], "heading": [1.0, 0.0, 0.0]},
    }


@pytest.fixture
def small_scene_config():
    return SceneConfig.model_validate(small_scene_dict())


@pytest.fixture
def small_scene(small_scene_config):
    return build_scene(small_scene_config, 2, scene_seed=0)


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / "scene.yaml"
    path.write_text(yaml.safe_dump(small_scene_dict()))
    return str(path)


@pytest.fixture
def tiny_experiment(scene_file, tmp_path):
    return ExperimentConfig(
        scene_file=scene_file,
        k_values=[2],
        horizon=2,
        history=2,
        samples=2,
        steps=12,
        seeds=[0],
        train_seeds=[5],
        training=TrainingConfig(
            epochs=3,
            batch_size=4,
            latent_dim=4,
            hidden=8,
            history_elements=4,
            validation_fraction=0.25,
        ),
        output_dir=str(tmp_path / "run"),
        workers=1,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
