"""Chain-of-states hallway environment with left/right/stop actions."""

from __future__ import annotations

from .base import Environment

LEFT, RIGHT, STOP = 0, 1, 2
ACTION_NAMES = ("left", "right", "stop")


class Hallway(Environment):
    """M states in a chain; moves off either end are no-ops.

    Observation is the 1-based position index. In a target episode a
    random (start, target) pair is drawn; the episode ends when the agent
    executes stop, scoring -t/t_max at the target and -1 anywhere else.
    A timed-out episode scores -1 via timeout_reward().
    """

    name = "hallway"
    encoding = "sparse"

    def __init__(self, m: int = 25, target_t_max: int = 30) -> None:
        super().__init__()
        if m < 2:
            raise ValueError("hallway needs at least 2 states")
        self.m = m
        self.target_t_max = target_t_max
        self.action_heads = (3,)
        self.obs_dim = m
        self.position = 1
        self.target = 1
        self._steps = 0
        self._stopped_at_target = False

    def _reset_selfplay(self, rng) -> None:
        self.position = int(rng.integers(1, self.m + 1))
        self._steps = 0

    def _reset_target(self, rng) -> None:
        self.position = int(rng.integers(1, self.m + 1))
        self.target = int(rng.integers(1, self.m + 1))
        self._steps = 0
        self._stopped_at_target = False

    def observe(self) -> int:
        return self.position

    def act(self, action: tuple[int, ...]) -> None:
        a = action[0]
        self._steps += 1
        self._last_reward = 0.0
        if a == LEFT:
            if self.position > 1:
                self.position -= 1
        elif a == RIGHT:
            if self.position < self.m:
                self.position += 1
        elif a == STOP:
            if self._mode == "target":
                self._done = True
                self._stopped_at_target = self.position == self.target
                if self._stopped_at_target:
                    self._last_reward = -self._steps / self.target_t_max
                else:
                    self._last_reward = -1.0
        else:
            raise ValueError(f"unknown hallway action {a}")

    def task_success(self) -> bool:
        return self._done and self._stopped_at_target

    def timeout_reward(self) -> float:
        return -1.0

    def snapshot(self) -> tuple:
        return (self.position,)

    def restore(self, snap: tuple) -> None:
        self.position = snap[0]

    def encode_obs(self, obs: int) -> tuple[int, ...]:
        return (obs - 1,)

    def obs_key(self, obs: int) -> int:
        return obs

    def is_stop_action(self, action: tuple[int, ...]) -> bool:
        return action[0] == STOP

    def target_goal(self) -> int:
        return self.target

    def enumerate_states(self) -> list[tuple]:
        return [(i,) for i in range(1, self.m + 1)]
