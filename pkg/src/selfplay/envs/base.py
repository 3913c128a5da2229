"""Common environment interface consumed by the episode engine.

Environments run in one of two modes, set by the reset call: self-play
(no external reward, success judged by observation comparison) or target
task (external reward, env-defined termination). The external reward
accessor is instrumented so tests can assert self-play never touches it.
"""

from __future__ import annotations

from typing import Any, Hashable


class Environment:
    """Base class; subclasses fill the per-environment mechanics.

    Attributes every subclass must set:
        name: short identifier used in configs and registries.
        action_heads: tuple of categorical head sizes, e.g. (6,) or (5, 2).
        obs_dim: length of one encoded observation segment.
        encoding: "sparse" (encode_obs returns active indices) or "dense"
            (encode_obs returns a float vector).
    """

    name: str = ""
    action_heads: tuple[int, ...] = ()
    obs_dim: int = 0
    encoding: str = "sparse"

    def __init__(self) -> None:
        self.external_reward_calls = 0
        self.selfplay_resets = 0
        self.target_resets = 0
        self._mode = "selfplay"
        self._done = False
        self._last_reward = 0.0

    # -- episode lifecycle ------------------------------------------------

    def reset_selfplay(self, rng) -> None:
        self.selfplay_resets += 1
        self._mode = "selfplay"
        self._done = False
        self._last_reward = 0.0
        self._reset_selfplay(rng)

    def reset_target(self, rng) -> None:
        self.target_resets += 1
        self._mode = "target"
        self._done = False
        self._last_reward = 0.0
        self._reset_target(rng)

    def observe(self) -> Any:
        raise NotImplementedError

    def act(self, action: tuple[int, ...]) -> None:
        raise NotImplementedError

    def reward(self) -> float:
        """External reward of the last executed action. Target task only."""
        self.external_reward_calls += 1
        return self._last_reward

    def done(self) -> bool:
        return self._done

    def task_success(self) -> bool:
        """Whether a finished target episode solved the task."""
        raise NotImplementedError

    def timeout_reward(self) -> float:
        """Terminal reward added when a target episode hits the step cap."""
        return 0.0

    # -- state handling ---------------------------------------------------

    def snapshot(self) -> tuple:
        """Dynamic state as a comparable, hashable tuple."""
        raise NotImplementedError

    def restore(self, snap: tuple) -> None:
        raise NotImplementedError

    # -- observation handling ---------------------------------------------

    def observations_equal(self, a: Any, b: Any) -> bool:
        return a == b

    def encode_obs(self, obs: Any):
        """Sparse index tuple or dense vector for the policy encoder."""
        raise NotImplementedError

    def obs_key(self, obs: Any) -> Hashable:
        """Hashable key for visit counts and histograms."""
        return obs

    def hist_key(self, obs: Any) -> Hashable:
        """Coarse key for the handover-state histogram; defaults to obs_key."""
        return self.obs_key(obs)

    def is_stop_action(self, action: tuple[int, ...]) -> bool:
        return False

    def target_goal(self) -> Any:
        """Goal observation for target episodes, or None for a zeroed goal."""
        return None

    # -- finite-state enumeration (oracle support) ------------------------

    def enumerate_states(self) -> list[tuple]:
        raise NotImplementedError(f"{self.name} has no finite enumeration")

    def actions(self) -> list[tuple[int, ...]]:
        """All action tuples, in a fixed order."""
        heads = self.action_heads
        out: list[tuple[int, ...]] = [()]
        for size in heads:
            out = [a + (i,) for a in out for i in range(size)]
        return out

    # -- subclass hooks ---------------------------------------------------

    def _reset_selfplay(self, rng) -> None:
        raise NotImplementedError

    def _reset_target(self, rng) -> None:
        raise NotImplementedError
