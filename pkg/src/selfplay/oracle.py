"""Brute-force ground truth for finite environments.

Enumerates the dynamic states of the environment's current layout,
builds the one-action transition graph, and computes exact minimal step
counts to reach each goal observation (multi-source reverse BFS, since
several states can present the same observation). Used to check that a
trained responder moves at near-minimal cost and that the proposer's
expected internal reward has collapsed to zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .engine import run_selfplay_episode


@dataclass
class DistanceOracle:
    states: list[tuple]
    obs_list: list
    dist: np.ndarray  # dist[i, j]: min actions from state i to match state j's observation

    def lookup(self, start: tuple, goal: tuple) -> float:
        i = self.states.index(start)
        j = self.states.index(goal)
        return float(self.dist[i, j])


def compute_distances(env) -> DistanceOracle:
    """Exact pairwise minimal step counts for the env's current layout.

    The env must already be in self-play mode; its layout is treated as
    fixed and only dynamic state is explored. Stop-like actions are
    excluded since they never move the state.
    """
    states = env.enumerate_states()
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    actions = [a for a in env.actions() if not env.is_stop_action(a)]

    obs_list = []
    preds: list[list[int]] = [[] for _ in range(n)]
    for i, snap in enumerate(states):
        env.restore(snap)
        obs_list.append(env.observe())
    for i, snap in enumerate(states):
        for a in actions:
            env.restore(snap)
            env.act(a)
            j = index[env.snapshot()]
            if j != i:
                preds[j].append(i)

    # group goal states by identical observation; one BFS per group
    groups: dict = {}
    for j, obs in enumerate(obs_list):
        groups.setdefault(obs, []).append(j)

    dist = np.full((n, n), np.inf)
    for obs, members in groups.items():
        d = np.full(n, np.inf)
        frontier = list(members)
        for j in members:
            d[j] = 0.0
        depth = 0.0
        while frontier:
            depth += 1.0
            nxt = []
            for j in frontier:
                for i in preds[j]:
                    if d[i] == np.inf:
                        d[i] = depth
                        nxt.append(i)
            frontier = nxt
        for j in members:
            dist[:, j] = d
    env.restore(states[0])
    return DistanceOracle(states=states, obs_list=obs_list, dist=dist)


@dataclass
class FastnessRow:
    start: tuple
    goal: tuple
    oracle_dist: float
    bob_steps: int
    passed: bool


def greedy_rollout(env, bob, start: tuple, goal_obs, cap: int, rng) -> tuple[int, bool]:
    """Run bob by per-head argmax from start until the goal observation.

    Returns (executed actions, reached). The rng only feeds the policy's
    sampler; the sampled action is ignored in favor of the argmax.
    """
    env.restore(start)
    bob.begin_episode(goal_obs, 0)
    steps = 0
    while True:
        s = env.observe()
        if env.observations_equal(s, goal_obs):
            return steps, True
        if steps >= cap:
            return steps, False
        _, cache = bob.act(s, rng)
        if cache is None:
            raise ValueError("policy exposes no action distribution")
        action = []
        off = 0
        for size in bob.head_sizes:
            action.append(int(np.argmax(cache.probs[off : off + size])))
            off += size
        env.act(tuple(action))
        steps += 1


def verify_bob_fastness(
    env,
    bob,
    rng,
    slack: int = 0,
    rollout_cap: int | None = None,
    pairs: list[tuple[tuple, tuple]] | None = None,
    oracle: DistanceOracle | None = None,
) -> list[FastnessRow]:
    """Compare greedy responder paths against exact minimal distances.

    A pair passes when the responder reaches the goal observation in at
    most oracle_dist + slack actions. Unreachable goals are skipped.
    """
    if oracle is None:
        oracle = compute_distances(env)
    index = {s: i for i, s in enumerate(oracle.states)}
    if pairs is None:
        pairs = [(s, g) for s in oracle.states for g in oracle.states]
    rows = []
    for start, goal in pairs:
        d = oracle.dist[index[start], index[goal]]
        if math.isinf(d):
            continue
        cap = rollout_cap if rollout_cap is not None else int(d) + slack
        goal_obs = oracle.obs_list[index[goal]]
        steps, reached = greedy_rollout(env, bob, start, goal_obs, cap, rng)
        passed = reached and steps <= d + slack
        rows.append(FastnessRow(start, goal, float(d), steps, passed))
    return rows


def write_fastness_report(rows: list[FastnessRow], path: str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["state", "goal", "oracle_dist", "bob_steps", "pass"])
        for r in rows:
            w.writerow([r.start, r.goal, r.oracle_dist, r.bob_steps, int(r.passed)])


def pass_rate(rows: list[FastnessRow]) -> float:
    if not rows:
        return 0.0
    return sum(r.passed for r in rows) / len(rows)


def estimate_alice_reward(
    env,
    alice,
    bob,
    mode: str,
    t_max: int,
    gamma: float,
    rng,
    episodes: int,
    alice_step_cap: int | None = None,
) -> tuple[float, float]:
    """Mean proposer reward and its standard error over fresh episodes."""
    rewards = []
    for _ in range(episodes):
        out = run_selfplay_episode(
            env, alice, bob, mode, t_max, gamma, rng, alice_step_cap=alice_step_cap
        )
        rewards.append(out.r_a)
    arr = np.asarray(rewards)
    se = arr.std(ddof=1) / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
    return float(arr.mean()), float(se)
