import time

import numpy as np
import pytest

from twinbeam.beamform.models import BeamformerSet, OptimizerConfig
from twinbeam.beamform.optimizer import expected_interference, initial_beams, proactive_optimize
from twinbeam.beamform.precoders import nf_focus
from twinbeam.beamform.reactive import reactive_beams
from twinbeam.predictor.models import TrajectoryBundle
from twinbeam.scene.models import Regime

NOISE = 1e-11


def random_bundle(rng, samples=3, horizon=2, links=3, elements=16, scale=1e-4):
    shape = (samples, horizon, links, elements)
    channels = scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape))
    reference = BeamformerSet(
        weights=np.stack([nf_focus(h) for h in channels[0, 0]]),
        powers=np.full(links, 1e-3),
    )
    return TrajectoryBundle.assemble(
        t=0,
        channels=channels,
        lambdas=np.ones(shape[:3]),
        blockage=np.ones(shape[:3]),
        regimes=np.zeros(shape[:3], dtype=int),
        positions=np.zeros((samples, horizon, 3)),
        beams=reference,
        noise=NOISE,
    )


def own_channels(rng, links=3, elements=16):
    return 1e-4 * (rng.normal(size=(links, elements)) + 1j * rng.normal(size=(links, elements)))


def test_objective_never_increases_and_budget_holds():
    config = OptimizerConfig(gamma_min=10 ** 0.5, noise_power=NOISE, max_iters=20)
    for seed in range(100):
        rng = np.random.default_rng(seed)
        bundle = random_bundle(rng)
        powers = np.full(3, 1e-3)
        result = proactive_optimize(bundle, [Regime.FF] * 3, config, own_channels(rng), powers)

        accepted = [row["objective"] for row in result.trace if row["accepted"]]
        assert np.all(np.diff(accepted) <= 0)
        assert result.trace[0]["iteration"] == 0
        assert result.beams.within_budget(powers.sum())
        assert result.objective == pytest.approx(expected_interference(bundle, result.beams), rel=1e-12)
        assert result.feasibility.shape == (3, 2)
        assert result.feasible == bool(np.all(result.feasibility))


def test_null_space_step_removes_predicted_interference(rng):
    # With more elements than predicted channels every interferer can be fully nulled
    bundle = random_bundle(rng, samples=2, horizon=2, links=3, elements=32)
    config = OptimizerConfig(gamma_min=1.0, noise_power=NOISE)
    start = initial_beams(bundle, [Regime.NF] * 3, own_channels(rng, elements=32), np.full(3, 1e-3))
    result = proactive_optimize(
        bundle, [Regime.NF] * 3, config, own_channels(rng, elements=32), np.full(3, 1e-3), initial=start
    )
    assert result.objective < 1e-12 * expected_interference(bundle, start)


def test_infeasible_constraint_is_reported(rng):
    bundle = random_bundle(rng, scale=1e-9)
    config = OptimizerConfig(gamma_min=1e6, noise_power=NOISE, max_iters=5)
    result = proactive_optimize(bundle, [Regime.FF] * 3, config, own_channels(rng), np.full(3, 1e-3))
    assert not result.feasible
    assert result.min_sinr < config.gamma_min


def test_power_budget_scales_beams(rng):
    bundle = random_bundle(rng)
    config = OptimizerConfig(gamma_min=1.0, noise_power=NOISE, power_budget=1.5e-3, max_iters=3)
    result = proactive_optimize(bundle, [Regime.FF] * 3, config, own_channels(rng), np.full(3, 1e-3))
    assert result.beams.radiated_power() <= 1.5e-3 * (1 + 1e-9)


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(gamma_min=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(gamma_min=1.0, max_iters=0)


def alignment(a, b):
    """|<a_k, b_k>| per row of unit beams; 1 means the same direction."""
    return np.abs(np.einsum("km,km->k", a.conj(), b))


def scaled_bundle(bundle, factor):
    return TrajectoryBundle.assemble(
        t=bundle.t,
        channels=factor * bundle.channels,
        lambdas=bundle.lambdas,
        blockage=bundle.blockage,
        regimes=bundle.regimes,
        positions=bundle.positions,
        beams=BeamformerSet(weights=np.eye(bundle.num_links, bundle.channels.shape[-1]), powers=np.ones(bundle.num_links)),
        noise=NOISE,
    )


def test_single_held_future_is_no_worse_than_reactive():
    powers = np.full(3, 1e-3)
    regimes = [Regime.NF, Regime.FF, Regime.NF]
    config = OptimizerConfig(gamma_min=1.0, noise_power=NOISE)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        current = own_channels(rng)
        own = own_channels(rng)
        reactive = reactive_beams(current, own, regimes, powers)
        bundle = TrajectoryBundle.assemble(
            t=0,
            channels=np.tile(current, (1, 2, 1, 1)),
            lambdas=np.ones((1, 2, 3)),
            blockage=np.ones((1, 2, 3)),
            regimes=np.zeros((1, 2, 3), dtype=int),
            positions=np.zeros((1, 2, 3)),
            beams=reactive,
            noise=NOISE,
        )
        result = proactive_optimize(bundle, regimes, config, own, powers)
        assert result.objective <= expected_interference(bundle, reactive) * (1 + 1e-12)


def test_directions_survive_a_common_channel_scale(rng):
    bundle = random_bundle(rng)
    own = own_channels(rng)
    powers = np.full(3, 1e-3)
    regimes = [Regime.FF, Regime.NF, Regime.FF]
    config = OptimizerConfig(gamma_min=1.0, noise_power=NOISE, max_iters=10)
    factor = 2.0 ** 10
    base = proactive_optimize(bundle, regimes, config, own, powers)

    # Channels alone: the objective only involves interferer beams
    alone = proactive_optimize(scaled_bundle(bundle, factor), regimes, config, factor * own, powers)
    assert np.allclose(alignment(base.beams.weights[1:], alone.beams.weights[1:]), 1.0)
    assert alone.objective == pytest.approx(factor ** 2 * base.objective, rel=1e-9)

    # Channels and noise together keep every SINR, so the serving beam follows
    joint_config = config.model_copy(update={"noise_power": NOISE * factor ** 2})
    joint = proactive_optimize(scaled_bundle(bundle, factor), regimes, joint_config, factor * own, powers)
    assert np.allclose(alignment(base.beams.weights, joint.beams.weights), 1.0)
    assert np.allclose(joint.beams.powers, base.beams.powers)


def test_iteration_time_grows_at_most_linearly_with_samples():
    def per_iteration(samples):
        rng = np.random.default_rng(7)
        bundle = random_bundle(rng, samples=samples, horizon=2, links=4, elements=64)
        own = own_channels(rng, links=4, elements=64)
        config = OptimizerConfig(gamma_min=1.0, noise_power=NOISE, max_iters=5)
        best = float("inf")
        for _ in range(5):
            start = time.perf_counter()
            result = proactive_optimize(bundle, [Regime.FF] * 4, config, own, np.full(4, 1e-3))
            best = min(best, (time.perf_counter() - start) / max(result.iterations, 1))
        return best

    # Doubling M doubles M*T*K
    assert per_iteration(16) <= 2.5 * per_iteration(8)
