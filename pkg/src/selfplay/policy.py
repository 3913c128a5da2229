"""Action policies over (current observation, goal observation) pairs.

Three kinds share one duck-typed interface: a softmax logits table for
small discrete state spaces, an MLP policy for structured observations,
and a fixed uniform mover used as a curriculum baseline. An episode is
always bracketed by begin_episode(goal, z); act() then conditions every
step on that goal. z flags goal-free external-task episodes and feeds
the network as an extra input bit.
"""

from __future__ import annotations

import math

import numpy as np

from . import net
from .envs.base import Environment


def sample_categorical(probs, start: int, size: int, u: float) -> int:
    """Index into probs[start:start+size] by cumulative mass; u in [0,1)."""
    acc = 0.0
    for i in range(size):
        acc += probs[start + i]
        if u < acc:
            return i
    return size - 1


class TabularPolicy:
    """Softmax over a logits table with one row per (state, goal) pair.

    Rows start at zero (uniform policy). The baseline is a constant
    scalar shared across all rows, tracked as an exponential moving
    average of episode returns; internal-task and external-task episodes
    keep separate scalars (their return scales differ by orders of
    magnitude), indexed by the same z bit the policy input carries. No
    baseline parameter is learned, so the squared-error baseline loss
    never contributes a gradient here.
    """

    trainable = True
    value_is_learned = False

    def __init__(self, env: Environment, baseline_decay: float = 0.99) -> None:
        if env.encoding != "sparse" or env.obs_dim <= 0:
            raise ValueError("tabular policy needs a finite sparse encoding")
        self.env = env
        self.n_states = env.obs_dim
        self.head_sizes = env.action_heads
        if len(self.head_sizes) != 1:
            raise ValueError("tabular policy supports a single action head")
        self.n_actions = self.head_sizes[0]
        self.table = np.zeros((self.n_states * self.n_states, self.n_actions))
        self.baselines = [0.0, 0.0]  # indexed by z
        self.baseline_decay = baseline_decay
        self.opt = net.RmspropState.for_params((self.table,))
        self._goal_idx = 0
        self._z = 0

    def _index(self, obs) -> int:
        idx = self.env.encode_obs(obs)
        if len(idx) != 1:
            raise ValueError("tabular policy needs single-index observations")
        return idx[0]

    def begin_episode(self, goal_obs, z: int) -> None:
        if goal_obs is None:
            raise ValueError("tabular policy episodes need a goal observation")
        self._goal_idx = self._index(goal_obs)
        self._z = z

    def act(self, obs, rng) -> tuple[tuple[int, ...], "TabularStep"]:
        row = self._index(obs) * self.n_states + self._goal_idx
        logits = self.table[row]
        hi = logits.max()
        exps = [math.exp(v - hi) for v in logits]
        total = sum(exps)
        probs = np.array([e / total for e in exps])
        a = sample_categorical(probs, 0, self.n_actions, rng.random())
        return (a,), TabularStep(row=row, probs=probs, z=self._z)

    # -- learning surface -------------------------------------------------

    def step_value(self, cache: "TabularStep") -> float:
        return self.baselines[cache.z]

    def grad_buffers(self) -> tuple[np.ndarray, ...]:
        return (np.zeros_like(self.table),)

    def accumulate_step(self, cache, dlogits, dvalue, grads) -> None:
        grads[0][cache.row] += dlogits

    def apply_grads(self, grads, lr: float) -> None:
        net.rmsprop_update((self.table,), grads, self.opt, lr)

    def update_baseline(self, episode_returns, zs) -> None:
        d = self.baseline_decay
        for g, z in zip(episode_returns, zs):
            self.baselines[z] = d * self.baselines[z] + (1.0 - d) * g


class TabularStep:
    __slots__ = ("row", "probs", "z")

    def __init__(self, row: int, probs: np.ndarray, z: int) -> None:
        self.row = row
        self.probs = probs
        self.z = z


class NeuralPolicy:
    """MLP policy: input = [current obs | goal obs | z], tanh trunk,
    softmax action heads plus a learned scalar baseline.

    Sparse environments feed word indices; the fixed goal segment's
    first-layer sum is computed once per episode.
    """

    trainable = True
    value_is_learned = True

    def __init__(
        self,
        env: Environment,
        rng,
        hidden: tuple[int, int] = (50, 50),
        init_std: float = 0.2,
    ) -> None:
        self.env = env
        self.head_sizes = env.action_heads
        self.hidden = tuple(hidden)
        self.in_dim = 2 * env.obs_dim + 1
        self.params = net.init_mlp(rng, self.in_dim, self.head_sizes, self.hidden, init_std)
        self.opt = net.RmspropState.for_params(self.params.arrays())
        self._head_arr = np.asarray(self.head_sizes, dtype=np.int64)
        self._sparse = env.encoding == "sparse"
        # per-episode conditioning
        self._pre: np.ndarray | None = None
        self._episode_idx = np.empty(0, dtype=np.int64)
        self._goal_vec = np.zeros(env.obs_dim)
        self._z = 0.0

    def begin_episode(self, goal_obs, z: int) -> None:
        if self._sparse:
            if goal_obs is None:
                goal_idx = np.empty(0, dtype=np.int64)
            else:
                goal_idx = np.asarray(self.env.encode_obs(goal_obs), dtype=np.int64)
                goal_idx = goal_idx + self.env.obs_dim
            self._pre = net.goal_precompute(self.params, goal_idx, z)
            if z:
                z_row = np.array([self.in_dim - 1], dtype=np.int64)
                self._episode_idx = np.concatenate([goal_idx, z_row])
            else:
                self._episode_idx = goal_idx
        else:
            if goal_obs is None:
                self._goal_vec = np.zeros(self.env.obs_dim)
            else:
                self._goal_vec = np.asarray(self.env.encode_obs(goal_obs), dtype=np.float64)
            self._z = float(z)

    def act(self, obs, rng) -> tuple[tuple[int, ...], net.ForwardCache]:
        p = self.params
        if self._sparse:
            cur_idx = np.asarray(self.env.encode_obs(obs), dtype=np.int64)
            h1, h2, probs, v = net._forward_sparse(
                self._pre, p.w1, p.w2, p.b2, p.wh, p.bh, p.wv, p.bv,
                cur_idx, self._head_arr,
            )
            full_idx = np.concatenate([cur_idx, self._episode_idx])
            cache = net.ForwardCache(idx=full_idx, x=None, h1=h1, h2=h2,
                                     probs=probs, value=float(v))
        else:
            x = np.empty(self.in_dim)
            d = self.env.obs_dim
            x[:d] = self.env.encode_obs(obs)
            x[d : 2 * d] = self._goal_vec
            x[2 * d] = self._z
            h1, h2, probs, v = net._forward_dense(
                x, p.w1, p.b1, p.w2, p.b2, p.wh, p.bh, p.wv, p.bv, self._head_arr,
            )
            cache = net.ForwardCache(idx=None, x=x, h1=h1, h2=h2,
                                     probs=probs, value=float(v))
        action = []
        off = 0
        for size in self.head_sizes:
            action.append(sample_categorical(probs, off, size, rng.random()))
            off += size
        return tuple(action), cache

    # -- learning surface -------------------------------------------------

    def step_value(self, cache: net.ForwardCache) -> float:
        return cache.value

    def grad_buffers(self) -> tuple[np.ndarray, ...]:
        return net.zero_grads(self.params)

    def accumulate_step(self, cache, dlogits, dvalue, grads) -> None:
        net.mlp_backward_into(self.params, cache, dlogits, dvalue, grads)

    def apply_grads(self, grads, lr: float) -> None:
        net.rmsprop_update(self.params.arrays(), grads, self.opt, lr)

    def update_baseline(self, episode_returns, zs) -> None:
        pass


class RandomPolicy:
    """Uniform over non-stop actions; never hands over on its own."""

    trainable = False
    value_is_learned = False

    def __init__(self, env: Environment) -> None:
        self.env = env
        self.head_sizes = env.action_heads
        self.actions = [a for a in env.actions() if not env.is_stop_action(a)]
        if not self.actions:
            raise ValueError("environment has no non-stop actions")

    def begin_episode(self, goal_obs, z: int) -> None:
        pass

    def act(self, obs, rng) -> tuple[tuple[int, ...], None]:
        return self.actions[int(rng.integers(len(self.actions)))], None
