import numpy as np
import pytest

from twinbeam.dynamics.blockage import blockage_process
from twinbeam.dynamics.environment import far_field_view, realize_environment
from twinbeam.dynamics.hotspots import assign_users, hotspot_activate, served_users
from twinbeam.dynamics.mobility import initial_state, mobility_step
from twinbeam.dynamics.models import Hotspot, MobilityState, SimulationConfig
from twinbeam.scene.models import Box, Regime

ROOM = Box(lower=[0.0, 0.0, 0.0], upper=[4.0, 4.0, 3.0])


def test_mobility_step_without_noise_is_ballistic():
    state = MobilityState(position=[1.0, 1.0, 1.5], velocity=[1.0, 0.5, 0.0], noise_sigma=0.0)
    moved = mobility_step(state, 0.1, None, ROOM)
    assert np.allclose(moved.position, [1.1, 1.05, 1.5])
    assert np.allclose(moved.velocity, state.velocity)


def test_mobility_step_reflects_at_walls():
    state = MobilityState(position=[3.95, 2.0, 1.5], velocity=[1.0, 0.0, 0.0], noise_sigma=0.0)
    moved = mobility_step(state, 0.1, None, ROOM)
    assert np.allclose(moved.position, [3.95, 2.0, 1.5])
    assert np.allclose(moved.velocity, [-1.0, 0.0, 0.0])
    assert moved.speed == pytest.approx(state.speed)


def test_mobility_step_leaves_obstacles():
    obstacle = Box(lower=[2.0, 0.0, 0.0], upper=[3.0, 4.0, 2.0])
    state = MobilityState(position=[1.95, 2.0, 1.0], velocity=[1.0, 0.0, 0.0], noise_sigma=0.0)
    moved = mobility_step(state, 0.1, None, ROOM, [obstacle])
    assert not obstacle.contains(moved.position, strict=True)
    assert moved.velocity[0] < 0


def test_mobility_step_stays_in_room_with_noise(rng):
    state = initial_state([0.01, 3.99, 0.01], [-1.0, 1.0, -1.0], 1.0, 0.05)
    for _ in range(200):
        state = mobility_step(state, 1e-2, rng, ROOM)
        assert ROOM.contains(state.position)


def test_mobility_step_rejects_bad_inputs():
    state = MobilityState(position=[1.0, 1.0, 1.0], velocity=[1.0, 0.0, 0.0], noise_sigma=0.01)
    with pytest.raises(ValueError):
        mobility_step(state, 0.0, np.random.default_rng(0), ROOM)
    with pytest.raises(ValueError):
        mobility_step(state, 0.1, None, ROOM)


def test_mobility_noise_matches_sigma():
    room = Box(lower=[-1000.0, -1000.0, -1000.0], upper=[1000.0, 1000.0, 1000.0])
    state = MobilityState(position=[0.0, 0.0, 0.0], velocity=[1.0, -0.5, 0.2], noise_sigma=0.01)
    rng = np.random.default_rng(11)
    dt = 1e-3
    displacements = np.empty((10_000, 3))
    for i in range(len(displacements)):
        moved = mobility_step(state, dt, rng, room)
        displacements[i] = moved.position - state.position
        state = moved

    drift = state.velocity * dt
    assert np.allclose(displacements.mean(axis=0), drift, atol=5e-4)
    assert np.std(displacements - drift) == pytest.approx(0.01, rel=0.05)


def test_blockage_process(small_scene):
    # Interferer 1 at (1.5, 1.5, 2.5); the obstacle shadows points behind it at low height
    assert blockage_process(small_scene, 1, [2.8, 1.5, 0.2]) == small_scene.blockage_factor
    assert blockage_process(small_scene, 0, [3.0, 4.0, 1.0]) == 1.0


def test_hotspot_poisson_statistics():
    hotspot = Hotspot(region=Box(lower=[0.0, 0.0, 0.0], upper=[1.0, 1.0, 1.0]), intensity=3.0)
    rng = np.random.default_rng(42)
    counts = np.array([hotspot_activate(hotspot, rng).active_users for _ in range(100000)])
    assert 2.97 <= counts.mean() <= 3.03
    assert counts.var() == pytest.approx(3.0, rel=0.05)


def test_hotspot_users_fall_in_region(rng):
    region = Box(lower=[1.0, 1.0, 1.0], upper=[1.5, 2.0, 1.2])
    hotspot = hotspot_activate(Hotspot(region=region, intensity=20.0), rng)
    assert hotspot.user_positions.shape == (hotspot.active_users, 3)
    assert all(region.contains(p) for p in hotspot.user_positions)
    assert hotspot.cleared().active_users == 0


def test_hotspot_rejects_negative_intensity():
    with pytest.raises(ValueError):
        Hotspot(region=ROOM, intensity=-1.0)


def test_assign_and_serve_nearest_users(small_scene):
    users = np.array([[1.6, 1.6, 1.0], [4.4, 1.4, 1.0], [4.0, 1.0, 1.0]])
    assert assign_users(small_scene, users) == [[], [0], [1, 2]]

    hotspot = Hotspot(
        region=Box(lower=[3.9, 0.9, 0.9], upper=[4.6, 1.7, 1.1]),
        intensity=1.0,
        active_users=2,
        user_positions=users[1:],
    )
    homes = [None, np.array([2.0, 2.0, 1.2]), np.array([5.0, 2.0, 1.2])]
    positions, from_hotspot = served_users(small_scene, [hotspot], homes)
    assert positions[0] is None
    assert np.allclose(positions[1], homes[1])
    assert np.allclose(positions[2], [4.4, 1.4, 1.0])
    assert from_hotspot.tolist() == [False, False, True]


def test_realize_environment_shapes(small_scene, small_scene_config):
    sim = SimulationConfig(steps=10)
    snapshots = realize_environment(small_scene, small_scene_config, sim, seed=3)
    assert len(snapshots) == 10
    first = snapshots[0]
    assert first.users.shape == (3, 3)
    assert first.cross_matrix().shape == (3, 3, 16)
    assert first.tagged_matrix().shape == (3, 16)
    assert np.allclose(first.position, small_scene_config.ue.start)
    # The hotspot window opens at step 3 and closes at step 8
    assert snapshots[2].hotspot_users == 0
    assert snapshots[8].hotspot_users == 0
    assert len({s.hotspot_users for s in snapshots[3:8]}) == 1


def test_realize_environment_is_deterministic(small_scene, small_scene_config):
    sim = SimulationConfig(steps=6)
    a = realize_environment(small_scene, small_scene_config, sim, seed=11)
    b = realize_environment(small_scene, small_scene_config, sim, seed=11)
    c = realize_environment(small_scene, small_scene_config, sim, seed=12)
    assert all(np.array_equal(x.cross_matrix(), y.cross_matrix()) for x, y in zip(a, b))
    assert not np.array_equal(a[-1].position, c[-1].position)


def test_realize_environment_rejects_zero_steps(small_scene, small_scene_config):
    with pytest.raises(ValueError):
        realize_environment(small_scene, small_scene_config, SimulationConfig(), seed=0, steps=0)


def test_far_field_view_forces_far_field(small_scene, small_scene_config):
    snapshot = realize_environment(small_scene, small_scene_config, SimulationConfig(steps=1), seed=0)[0]
    view = far_field_view(small_scene, SimulationConfig().path_loss, snapshot)
    assert all(ch.regime == Regime.FF for row in view.channels for ch in row)
    assert np.array_equal(view.blockage, snapshot.blockage)
