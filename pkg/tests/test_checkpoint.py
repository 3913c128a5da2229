"""Checkpoint save/load round trips and validation."""

import numpy as np
import pytest

from selfplay.checkpoint import load_checkpoint, save_checkpoint
from selfplay.config import ExperimentConfig, build_env, build_policies
from selfplay.engine import run_selfplay_episode


def hallway_setup(seed=0):
    cfg = ExperimentConfig(env="hallway", policy="tabular", m=7)
    env = build_env(cfg)
    rng = np.random.default_rng(seed)
    alice, bob = build_policies(cfg, env, rng)
    return env, alice, bob, rng


def scramble(policy, rng):
    policy.table += rng.normal(size=policy.table.shape)
    policy.opt.m[0][...] += rng.random(size=policy.opt.m[0].shape)
    policy.baselines = [rng.random(), -rng.random()]


def test_tabular_roundtrip(tmp_path):
    env, alice, bob, rng = hallway_setup()
    scramble(alice, rng)
    scramble(bob, rng)
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {"target_eps": 123, "selfplay_eps": 45})

    env2, alice2, bob2, rng2 = hallway_setup(seed=99)
    counters = load_checkpoint(path, alice2, bob2, rng2)
    assert counters == {"target_eps": 123, "selfplay_eps": 45}
    assert np.array_equal(alice2.table, alice.table)
    assert np.array_equal(bob2.table, bob.table)
    assert np.array_equal(bob2.opt.m[0], bob.opt.m[0])
    assert bob2.baselines == bob.baselines
    assert rng2.bit_generator.state == rng.bit_generator.state


def test_restored_run_continues_identically(tmp_path):
    env, alice, bob, rng = hallway_setup(seed=3)
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {})

    out_a = [
        run_selfplay_episode(env, alice, bob, "reverse", 20, 0.033, rng)
        for _ in range(5)
    ]
    env2, alice2, bob2, rng2 = hallway_setup(seed=77)
    load_checkpoint(path, alice2, bob2, rng2)
    out_b = [
        run_selfplay_episode(env2, alice2, bob2, "reverse", 20, 0.033, rng2)
        for _ in range(5)
    ]
    assert [(o.t_a, o.t_b, o.r_a, o.r_b) for o in out_a] == [
        (o.t_a, o.t_b, o.r_a, o.r_b) for o in out_b
    ]


def test_neural_roundtrip(tmp_path):
    cfg = ExperimentConfig(env="mountaincar", policy="neural", mode="repeat")
    env = build_env(cfg)
    rng = np.random.default_rng(1)
    alice, bob = build_policies(cfg, env, rng)
    bob.params.w1 += 0.25
    bob.opt.m[0][...] += 0.5
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {"env_steps": 7})

    alice2, bob2 = build_policies(cfg, env, np.random.default_rng(2))
    counters = load_checkpoint(path, alice2, bob2)
    assert counters == {"env_steps": 7}
    for x, y in zip(bob2.params.arrays(), bob.params.arrays()):
        assert np.array_equal(x, y)
    assert np.array_equal(bob2.opt.m[0], bob.opt.m[0])


def test_random_alice_stores_no_arrays(tmp_path):
    cfg = ExperimentConfig(
        env="hallway", policy="tabular", random_alice=True, selfplay_percent=20.0
    )
    env = build_env(cfg)
    rng = np.random.default_rng(4)
    alice, bob = build_policies(cfg, env, rng)
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {})
    with np.load(path, allow_pickle=False) as z:
        assert not any(k.startswith("alice_") for k in z.files)

    alice2, bob2 = build_policies(cfg, env, np.random.default_rng(5))
    load_checkpoint(path, alice2, bob2)
    assert np.array_equal(bob2.table, bob.table)


def test_kind_mismatch_rejected(tmp_path):
    env, alice, bob, rng = hallway_setup()
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {})

    cfg = ExperimentConfig(
        env="hallway", policy="tabular", random_alice=True, selfplay_percent=20.0
    )
    alice_r, bob_r = build_policies(cfg, env, np.random.default_rng(0))
    with pytest.raises(ValueError):
        load_checkpoint(path, alice_r, bob_r)


def test_version_mismatch_rejected(tmp_path):
    env, alice, bob, rng = hallway_setup()
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {})
    import json

    data = dict(np.load(path, allow_pickle=False))
    meta = json.loads(str(data["meta"]))
    meta["format_version"] = 999
    data["meta"] = np.array(json.dumps(meta))
    np.savez(path, **data)
    with pytest.raises(ValueError):
        load_checkpoint(path, alice, bob)


def test_shape_mismatch_rejected(tmp_path):
    env, alice, bob, rng = hallway_setup()
    path = tmp_path / "ck.npz"
    save_checkpoint(path, alice, bob, rng, {})
    cfg = ExperimentConfig(env="hallway", policy="tabular", m=9)
    env9 = build_env(cfg)
    alice9, bob9 = build_policies(cfg, env9, np.random.default_rng(0))
    with pytest.raises(ValueError):
        load_checkpoint(path, alice9, bob9)
