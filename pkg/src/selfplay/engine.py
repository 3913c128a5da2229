"""Episode engine: the two-mind handover episode and the external-task
episode.

Self-play: Alice acts from the start state until she emits stop (or the
shared step budget forces a handover), then Bob must reach the goal
observation: the start state in reverse mode, Alice's final state in
repeat mode (after the environment is rolled back to the start state).
Success is judged by observation equality, so anything invisible to Bob
is not his problem. Only internal rewards are produced; the external
reward channel is never read here.

Loop-order details that matter and are covered by tests:
- Alice's step counter includes the handover step itself, so stopping is
  not free and a forced handover at the budget leaves Bob zero steps.
- Bob's goal check runs before he acts; reaching the goal costs nothing
  extra, and starting on it means instant success.
- On failure Bob's step count equals the leftover budget by
  construction.
- In an external-task episode the action sampled on the final iteration
  is discarded, so a budget of t_max executes at most t_max - 1 actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

REVERSE = "reverse"
REPEAT = "repeat"


@dataclass
class Trace:
    """One mind's episode record, consumed by the gradient step.

    steps holds (observation, action, forward cache) tuples for every
    sampled action, executed or not. rewards, when present, align with
    steps; terminal_reward lands on the final step's return. bonuses are
    optional per-step exploration additions attached by the runner.
    """

    steps: list[tuple[Any, tuple[int, ...], Any]] = field(default_factory=list)
    rewards: list[float] | None = None
    terminal_reward: float = 0.0
    bonuses: list[float] | None = None
    z: int = 0  # 0 self-play, 1 external task; mirrors the policy input bit

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class SelfPlayResult:
    alice: Trace
    bob: Trace
    t_a: int
    t_b: int
    success: bool
    r_a: float
    r_b: float
    env_steps: int
    s_star_key: Hashable
    alice_stop_key: Hashable
    alice_objects: frozenset[str]


@dataclass
class TargetResult:
    trace: Trace
    reward: float
    success: bool
    env_steps: int


def compute_selfplay_rewards(
    t_a: int, t_b: int, t_max: int, gamma: float, success: bool
) -> tuple[float, float]:
    """Alice earns gamma*(Bob's excess time); Bob pays gamma per step.

    A failed episode charges Bob the whole leftover budget.
    """
    if not success:
        t_b = t_max - t_a
    r_a = gamma * max(0, t_b - t_a)
    r_b = -gamma * t_b
    return r_a, r_b


def run_selfplay_episode(
    env,
    alice,
    bob,
    mode: str,
    t_max: int,
    gamma: float,
    rng,
    alice_step_cap: int | None = None,
) -> SelfPlayResult:
    if mode not in (REVERSE, REPEAT):
        raise ValueError(f"unknown self-play mode {mode!r}")
    env.reset_selfplay(rng)
    s0 = env.observe()
    snap0 = env.snapshot()
    s_star = s0

    cap = t_max if alice_step_cap is None else min(t_max, alice_step_cap)
    alice_trace = Trace()
    alice.begin_episode(s0, 0)
    t_a = 0
    executed = 0
    while True:
        t_a += 1
        s = env.observe()
        a, cache = alice.act(s, rng)
        alice_trace.steps.append((s, a, cache))
        if env.is_stop_action(a) or t_a >= cap:
            alice_stop = s
            if mode == REPEAT:
                s_star = s
                env.restore(snap0)
            break
        env.act(a)
        executed += 1

    bob_trace = Trace()
    bob.begin_episode(s_star, 0)
    t_b = 0
    success = False
    alice_objects = frozenset(getattr(env, "interactions", ()))
    while True:
        s = env.observe()
        if env.observations_equal(s, s_star):
            success = True
            break
        if t_a + t_b >= t_max:
            break
        t_b += 1
        a, cache = bob.act(s, rng)
        bob_trace.steps.append((s, a, cache))
        env.act(a)
        executed += 1

    r_a, r_b = compute_selfplay_rewards(t_a, t_b, t_max, gamma, success)
    alice_trace.terminal_reward = r_a
    bob_trace.terminal_reward = r_b
    return SelfPlayResult(
        alice=alice_trace,
        bob=bob_trace,
        t_a=t_a,
        t_b=t_b,
        success=success,
        r_a=r_a,
        r_b=r_b,
        env_steps=executed,
        s_star_key=env.obs_key(s_star),
        alice_stop_key=env.hist_key(alice_stop),
        alice_objects=alice_objects,
    )


def run_target_episode(env, bob, t_max: int, rng) -> TargetResult:
    env.reset_target(rng)
    bob.begin_episode(env.target_goal(), 1)
    trace = Trace(rewards=[], z=1)
    total = 0.0
    t = 0
    while True:
        t += 1
        s = env.observe()
        a, cache = bob.act(s, rng)
        if env.done() or t >= t_max:
            break
        env.act(a)
        r = env.reward()
        trace.steps.append((s, a, cache))
        trace.rewards.append(r)
        total += r
    if not env.done():
        trace.terminal_reward = env.timeout_reward()
        total += trace.terminal_reward
    return TargetResult(
        trace=trace,
        reward=total,
        success=env.task_success(),
        env_steps=len(trace.steps),
    )
