import math

import numpy as np
import pytest

from twinbeam.channel.models import NlosPath, PathLossModel
from twinbeam.channel.synthesis import (
    doppler_and_coherence,
    hybrid_channel,
    link_channel,
    los_channel,
    los_gain,
    nlos_path_loss,
    nlos_paths,
    path_loss,
)
from twinbeam.config.scene_file import SceneConfig
from twinbeam.scene.builder import build_scene
from twinbeam.scene.models import Regime

from .conftest import small_scene_dict


def brute_force_channel(scene, model, k, u, regime, blockage):
    """Per-element sum over the LoS and scattered paths, one element at a time."""
    tx = scene.transmitter(k)
    wavelength = scene.wavelength
    wavenumber = 2.0 * math.pi / wavelength
    point = np.asarray(u, dtype=float)
    d = math.dist(point, tx.center)
    excess = model.c0 * (d / model.d_ref) ** (-model.alpha)
    beta = (wavelength / (4.0 * math.pi * d)) ** 2
    h = np.zeros(tx.array.num_elements, dtype=complex)
    for m, element in enumerate(tx.array.element_positions):
        if regime == Regime.NF:
            r = math.dist(point, element)
        else:
            r = d
        value = math.sqrt(excess * beta) * complex(math.cos(-wavenumber * r), math.sin(-wavenumber * r))
        for scatterer, reflection in zip(scene.scatterers_of(k), scene.reflections_of(k)):
            r_bs = math.dist(tx.center, scatterer)
            r_ue = math.dist(scatterer, point)
            gain = math.sqrt(excess) * wavelength * reflection / (4.0 * math.pi * math.sqrt(r_bs * r_ue))
            path = math.dist(element, scatterer) + r_ue if regime == Regime.NF else r_bs + r_ue
            value += gain * complex(math.cos(-wavenumber * path), math.sin(-wavenumber * path))
        h[m] = value
    return math.sqrt(blockage) * h


def common_scene(paths_per_link=3, scene_seed=0):
    raw = small_scene_dict()
    raw["far_field_model"] = "common"
    raw["paths_per_link"] = paths_per_link
    return build_scene(SceneConfig.model_validate(raw), 2, scene_seed=scene_seed)


def test_doppler_and_coherence_at_100ghz():
    doppler, coherence = doppler_and_coherence(1.0, 100.0e9)
    assert doppler == pytest.approx(333.56, rel=5e-3)
    assert coherence == pytest.approx(1.268e-3, rel=5e-3)


def test_doppler_static_ue_has_unbounded_coherence():
    assert doppler_and_coherence(0.0, 100.0e9) == (0.0, math.inf)
    with pytest.raises(ValueError):
        doppler_and_coherence(-1.0, 100.0e9)


def test_los_gain_value():
    assert los_gain(0.003, 1.0) == pytest.approx(5.6992e-8, rel=1e-4)
    with pytest.raises(ValueError):
        los_gain(0.003, 0.0)


def test_path_loss_defaults_to_identity():
    assert path_loss(PathLossModel(), 3.7) == 1.0
    assert path_loss(PathLossModel(c0=2.0, alpha=2.0), 2.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        path_loss(PathLossModel(), 0.0)


def test_nlos_path_loss_is_product_distance():
    path = NlosPath(scatterer=np.zeros(3), reflection=0.5, r_bs=2.0, r_ue=3.0)
    expected = 0.003 ** 2 * 0.25 / ((4.0 * math.pi) ** 2 * 6.0)
    assert nlos_path_loss(path, 0.003) == pytest.approx(expected)


def test_nlos_path_rejects_zero_distance():
    with pytest.raises(ValueError):
        NlosPath(scatterer=np.zeros(3), reflection=0.5, r_bs=0.0, r_ue=3.0)


def test_hybrid_channel_matches_brute_force(rng):
    scene = common_scene()
    model = PathLossModel(c0=1.5, alpha=1.2)
    for _ in range(1000):
        k = int(rng.integers(scene.num_links))
        u = rng.uniform([0.2, 0.2, 0.5], [5.8, 5.8, 2.0])
        regime = Regime(int(rng.integers(2)))
        blockage = float(rng.choice([1.0, scene.blockage_factor]))
        link = hybrid_channel(scene, model, k, u, regime, blockage, nlos_paths(scene, k, u))
        expected = brute_force_channel(scene, model, k, u, regime, blockage)
        # Phases reach ~1e4 rad, so float64 rounding alone is ~1e-12
        assert np.linalg.norm(link.h_eff - expected) <= 1e-10 * np.linalg.norm(expected)


def test_single_path_norm_is_elements_times_beta():
    scene = common_scene(paths_per_link=1)
    u = [2.0, 3.5, 1.2]
    for regime in (Regime.NF, Regime.FF):
        link = link_channel(scene, PathLossModel(), 0, u, 1.0, regime=regime)
        d = math.dist(u, scene.transmitter(0).center)
        assert link.gain == pytest.approx(scene.num_elements * los_gain(scene.wavelength, d), rel=1e-12)
        assert link.lambda_nlos == 0.0


def test_common_far_field_is_flat_across_elements():
    scene = common_scene(paths_per_link=1)
    h = los_channel(scene, 1, [4.0, 4.0, 1.0], Regime.FF)
    assert np.allclose(h, h[0])


def test_planar_far_field_varies_across_elements(small_scene):
    h = los_channel(small_scene, 1, [4.0, 4.0, 1.0], Regime.FF)
    assert np.allclose(np.abs(h), np.abs(h[0]))
    assert not np.allclose(h, h[0])


def test_blockage_scales_effective_channel(small_scene):
    u = [2.5, 3.5, 1.2]
    model = PathLossModel()
    clear = link_channel(small_scene, model, 0, u, 1.0)
    blocked = link_channel(small_scene, model, 0, u, small_scene.blockage_factor)
    assert np.allclose(clear.h, blocked.h)
    assert blocked.gain == pytest.approx(small_scene.blockage_factor * clear.gain)
    assert clear.gain == pytest.approx(clear.lambda_total * np.vdot(clear.h, clear.h).real)


def test_hybrid_channel_rejects_unknown_blockage(small_scene):
    u = [2.5, 3.5, 1.2]
    with pytest.raises(ValueError):
        hybrid_channel(small_scene, PathLossModel(), 0, u, Regime.FF, 0.5, [])


def test_channel_at_element_position_is_rejected(small_scene):
    element = small_scene.transmitter(0).array.element_positions[0]
    with pytest.raises(ValueError):
        los_channel(small_scene, 0, element, Regime.NF)
