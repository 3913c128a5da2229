"""Gridworld with a light switch, a key switch, and a wall with a door.

A vertical wall splits the grid; its single door cell is passable only
while the door is open. Toggling the key switch opens/closes the door,
toggling the light switch turns the light on/off. With the light off the
agent sees only the glowing light switch and its own location.

Observations are bags of (object, location) words, encoded as a sorted
tuple of word indices: word = block * n_cells + cell.
"""

from __future__ import annotations

from .base import Environment

UP, DOWN, LEFT, RIGHT, TOGGLE, STOP = 0, 1, 2, 3, 4, 5
ACTION_NAMES = ("up", "down", "left", "right", "toggle", "stop")
_DELTAS = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}

# word blocks
AGENT, LIGHT_ON, LIGHT_OFF, KEY, DOOR_OPEN, DOOR_CLOSED, WALL, GOAL = range(8)
N_BLOCKS = 8


class LightKey(Environment):
    """6x6 grid by default, wall in column `wall_col` (0-based).

    Self-play mazes sample the light state with probability `p_light_off`
    of being off, a uniform door state, and uniform non-colliding item
    placements. Target mazes fix light off, door closed, goal across the
    wall from the agent, and both switches on the agent's side.
    """

    name = "lightkey"
    encoding = "sparse"

    def __init__(
        self,
        width: int = 6,
        height: int = 6,
        wall_col: int = 3,
        p_light_off: float = 0.5,
        step_cost: float = 0.1,
    ) -> None:
        super().__init__()
        if not 0 < wall_col < width - 1:
            raise ValueError("wall must have cells on both sides")
        if not 0.0 <= p_light_off <= 1.0:
            raise ValueError("p_light_off must be a probability")
        self.width = width
        self.height = height
        self.wall_col = wall_col
        self.p_light_off = p_light_off
        self.step_cost = step_cost
        self.n_cells = width * height
        self.action_heads = (6,)
        self.obs_dim = N_BLOCKS * self.n_cells

        self.wall_cells = frozenset(r * width + wall_col for r in range(height))
        self.left_cells = [r * width + c for r in range(height) for c in range(wall_col)]
        self.right_cells = [
            r * width + c for r in range(height) for c in range(wall_col + 1, width)
        ]

        # layout (fixed within an episode)
        self.door_cell = next(iter(self.wall_cells))
        self.light_cell = 0
        self.key_cell = 1
        self.goal_cell: int | None = None
        # dynamic state
        self.agent = 2
        self.light_on = True
        self.door_open = False
        self._steps = 0
        self.interactions: set[str] = set()

    # -- generation -------------------------------------------------------

    def _sample_layout(self, rng, cells: list[int], k: int) -> list[int]:
        picks = rng.choice(len(cells), size=k, replace=False)
        return [cells[int(i)] for i in picks]

    def _reset_selfplay(self, rng) -> None:
        self.door_cell = self.door_cell_at(int(rng.integers(self.height)))
        side_cells = self.left_cells + self.right_cells
        self.light_cell, self.key_cell, self.agent = self._sample_layout(rng, side_cells, 3)
        self.goal_cell = None
        self.light_on = not (rng.random() < self.p_light_off)
        self.door_open = bool(rng.integers(2))
        self._steps = 0
        self.interactions = set()

    def _reset_target(self, rng) -> None:
        self.door_cell = self.door_cell_at(int(rng.integers(self.height)))
        if rng.integers(2) == 0:
            agent_side, goal_side = self.left_cells, self.right_cells
        else:
            agent_side, goal_side = self.right_cells, self.left_cells
        self.light_cell, self.key_cell, self.agent = self._sample_layout(rng, agent_side, 3)
        self.goal_cell = goal_side[int(rng.integers(len(goal_side)))]
        self.light_on = False
        self.door_open = False
        self._steps = 0
        self.interactions = set()

    def door_cell_at(self, row: int) -> int:
        return row * self.width + self.wall_col

    # -- mechanics --------------------------------------------------------

    def _passable(self, cell: int) -> bool:
        if cell in self.wall_cells:
            return cell == self.door_cell and self.door_open
        return True

    def act(self, action: tuple[int, ...]) -> None:
        a = action[0]
        self._steps += 1
        self._last_reward = 0.0
        if a in _DELTAS:
            dr, dc = _DELTAS[a]
            r, c = divmod(self.agent, self.width)
            nr, nc = r + dr, c + dc
            if 0 <= nr < self.height and 0 <= nc < self.width:
                cell = nr * self.width + nc
                if self._passable(cell):
                    self.agent = cell
                    if cell == self.door_cell:
                        self.interactions.add("door")
        elif a == TOGGLE:
            if self.agent == self.light_cell:
                self.light_on = not self.light_on
                self.interactions.add("light")
            elif self.agent == self.key_cell:
                self.door_open = not self.door_open
                self.interactions.add("key")
        elif a == STOP:
            pass
        else:
            raise ValueError(f"unknown lightkey action {a}")
        if self._mode == "target":
            self._last_reward = -self.step_cost
            if self.agent == self.goal_cell:
                self._done = True

    def task_success(self) -> bool:
        return self._done and self.agent == self.goal_cell

    # -- observation ------------------------------------------------------

    def observe(self) -> tuple[int, ...]:
        n = self.n_cells
        agent_word = AGENT * n + self.agent
        light_block = LIGHT_ON if self.light_on else LIGHT_OFF
        light_word = light_block * n + self.light_cell
        if not self.light_on:
            return tuple(sorted((agent_word, light_word)))
        words = [agent_word, light_word, KEY * n + self.key_cell]
        door_block = DOOR_OPEN if self.door_open else DOOR_CLOSED
        words.append(door_block * n + self.door_cell)
        words.extend(WALL * n + c for c in self.wall_cells if c != self.door_cell)
        if self.goal_cell is not None:
            words.append(GOAL * n + self.goal_cell)
        return tuple(sorted(words))

    def encode_obs(self, obs: tuple[int, ...]) -> tuple[int, ...]:
        return obs

    def hist_key(self, obs: tuple[int, ...]) -> int:
        """Agent cell; the agent word is the only word below n_cells."""
        return min(obs)

    def snapshot(self) -> tuple:
        return (self.agent, self.light_on, self.door_open)

    def restore(self, snap: tuple) -> None:
        self.agent, self.light_on, self.door_open = snap

    def is_stop_action(self, action: tuple[int, ...]) -> bool:
        return action[0] == STOP

    def enumerate_states(self) -> list[tuple]:
        """All reachable dynamic states of the current layout.

        The agent can occupy the door cell only while the door is open
        (the door cannot close under it: the key switch is a side cell).
        """
        states = []
        positions = [c for c in range(self.n_cells) if c not in self.wall_cells]
        for pos in positions + [self.door_cell]:
            for light in (False, True):
                for door in (False, True):
                    if pos == self.door_cell and not door:
                        continue
                    states.append((pos, light, door))
        return states
