"""Mountain car with a 5-bin discretized force and a binary stop head."""

from __future__ import annotations

import math

import numpy as np

from .base import Environment

FORCES = (-1.0, -0.5, 0.0, 0.5, 1.0)

POS_MIN, POS_MAX = -1.2, 0.6
VEL_MIN, VEL_MAX = -0.07, 0.07
GOAL_POS = 0.5
SUCCESS_RADIUS = 0.2


class MountainCar(Environment):
    """Car in a 1-D valley; +1 external reward only on escaping the hill.

    Action tuple is (force_bin, stop_bit). The stop bit is read by the
    engine for Alice's handover; the dynamics ignore it. Observations are
    (position, velocity) vectors and two observations match when their
    Euclidean distance is below 0.2.
    """

    name = "mountaincar"
    encoding = "dense"

    def __init__(self) -> None:
        super().__init__()
        self.action_heads = (5, 2)
        self.obs_dim = 2
        self.position = -0.5
        self.velocity = 0.0

    def _reset_selfplay(self, rng) -> None:
        self.position = float(rng.uniform(-0.6, -0.4))
        self.velocity = 0.0

    def _reset_target(self, rng) -> None:
        self.position = float(rng.uniform(-0.6, -0.4))
        self.velocity = 0.0

    def observe(self) -> np.ndarray:
        return np.array([self.position, self.velocity])

    def act(self, action: tuple[int, ...]) -> None:
        f = FORCES[action[0]]
        v = self.velocity + 0.001 * f - 0.0025 * math.cos(3.0 * self.position)
        v = min(max(v, VEL_MIN), VEL_MAX)
        p = min(max(self.position + v, POS_MIN), POS_MAX)
        self.position, self.velocity = p, v
        self._last_reward = 0.0
        if self._mode == "target" and p >= GOAL_POS:
            self._done = True
            self._last_reward = 1.0

    def task_success(self) -> bool:
        return self._done and self.position >= GOAL_POS

    def observations_equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) < SUCCESS_RADIUS

    def encode_obs(self, obs: np.ndarray) -> np.ndarray:
        return np.asarray(obs, dtype=np.float64)

    def obs_key(self, obs: np.ndarray) -> tuple[int, int]:
        # 0.1-wide position bins, 0.01-wide velocity bins
        return (int(math.floor(obs[0] / 0.1)), int(math.floor(obs[1] / 0.01)))

    def is_stop_action(self, action: tuple[int, ...]) -> bool:
        return action[1] == 1

    def snapshot(self) -> tuple:
        return (self.position, self.velocity)

    def restore(self, snap: tuple) -> None:
        self.position, self.velocity = snap
