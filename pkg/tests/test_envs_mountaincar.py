"""Mountain car: dynamics constants, clamping, and goal detection."""

import math

import numpy as np
import pytest

from selfplay.envs import MountainCar


def fresh(mode="selfplay", seed=0):
    env = MountainCar()
    rng = np.random.default_rng(seed)
    if mode == "selfplay":
        env.reset_selfplay(rng)
    else:
        env.reset_target(rng)
    return env


def set_state(env, position, velocity):
    env.position = position
    env.velocity = velocity


def test_velocity_update_formula():
    env = fresh()
    set_state(env, -0.5, 0.0)
    env.act((2, 0))  # zero force
    dv = -0.0025 * math.cos(3.0 * -0.5)
    assert env.velocity == pytest.approx(dv, rel=1e-12)
    assert env.velocity == pytest.approx(-0.000177, abs=1e-6)
    assert env.position == pytest.approx(-0.5 + dv, rel=1e-12)


def test_force_bins_are_uniform():
    vs = []
    for bin_ in range(5):
        env = fresh()
        set_state(env, -0.5, 0.0)
        env.act((bin_, 0))
        vs.append(env.velocity)
    diffs = np.diff(vs)
    assert np.allclose(diffs, 0.0005)  # five forces spanning [-1, 1]


def test_velocity_clamped_high():
    env = fresh()
    set_state(env, -1.05, 0.069)  # gravity pushes right here
    env.act((4, 0))
    assert env.velocity == 0.07


def test_velocity_clamped_low():
    env = fresh()
    set_state(env, -0.5, -0.0695)
    env.act((0, 0))
    assert env.velocity == -0.07


def test_position_clamped_at_left_wall():
    env = fresh()
    set_state(env, -1.19, -0.05)
    env.act((2, 0))
    assert env.position == -1.2


def test_position_clamped_at_right_edge():
    env = fresh()
    set_state(env, 0.58, 0.05)
    env.act((2, 0))
    assert env.position == 0.6


def test_goal_crossing_ends_target_episode():
    env = fresh(mode="target")
    set_state(env, 0.46, 0.06)
    env.act((4, 0))
    assert env.position >= 0.5
    assert env.done()
    assert env.reward() == 1.0
    assert env.task_success()


def test_goal_crossing_inert_during_selfplay():
    env = fresh()
    set_state(env, 0.46, 0.06)
    env.act((4, 0))
    assert env.position >= 0.5
    assert not env.done()
    assert env.reward() == 0.0


def test_stop_bit_does_not_touch_dynamics():
    a, b = fresh(), fresh()
    set_state(a, -0.5, 0.01)
    set_state(b, -0.5, 0.01)
    a.act((3, 0))
    b.act((3, 1))
    assert a.snapshot() == b.snapshot()
    assert b.is_stop_action((3, 1))
    assert not b.is_stop_action((3, 0))


def test_unpowered_car_stays_in_valley():
    # from rest at the bottom, zero force can never climb out
    env = fresh()
    set_state(env, -0.5, 0.0)
    for _ in range(500):
        env.act((2, 0))
        assert env.position < 0.5
        assert -1.2 <= env.position <= 0.6
        assert -0.07 <= env.velocity <= 0.07


def test_pumping_with_the_velocity_escapes():
    # sanity bound for the task being solvable at all: push along the
    # current velocity to build energy across swings
    env = fresh(mode="target")
    set_state(env, -0.5, 0.0)
    env.act((0, 0))
    steps = 1
    while not env.done() and steps < 500:
        env.act((4 if env.velocity > 0 else 0, 0))
        steps += 1
    assert env.task_success()
    assert steps < 500


def test_observation_and_match_radius():
    env = fresh()
    set_state(env, -0.5, 0.01)
    assert env.observe() == pytest.approx([-0.5, 0.01])
    assert env.observations_equal((0.0, 0.0), (0.19, 0.0))
    assert not env.observations_equal((0.0, 0.0), (0.21, 0.0))


def test_observation_key_bins():
    env = fresh()
    assert env.obs_key((-0.5, 0.0)) == (-5, 0)
    assert env.obs_key((-0.45, 0.013)) == (-5, 1)
    assert env.obs_key((0.05, -0.001)) == (0, -1)


def test_resets_start_at_rest_near_bottom():
    env = MountainCar()
    rng = np.random.default_rng(2)
    for _ in range(1000):
        env.reset_target(rng)
        assert -0.6 <= env.position <= -0.4
        assert env.velocity == 0.0
    assert env.action_heads == (5, 2)
    assert env.obs_dim == 2
