"""Policy-gradient learning step and the count-based exploration bonus.

The per-step objective being ascended is

    log pi(a_t) * (G_t - v_t)  +  beta * H(pi(.|s_t))  -  lambda * (G_t - v_t)^2

with G_t the undiscounted suffix sum of rewards (terminal reward
included on the last step), v_t the baseline, beta the entropy weight
and lambda the baseline regression weight. The advantage in the log-prob
term treats the baseline as a constant; only the squared term trains it.
Gradients are summed over every step of every trace in the batch, then
one RMSProp step is applied.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import Trace

BASELINE_COEF = 0.1


def returns_from(trace: Trace) -> np.ndarray:
    """Suffix sums of per-step rewards plus the terminal reward."""
    n = len(trace.steps)
    rewards = trace.rewards if trace.rewards is not None else [0.0] * n
    if trace.bonuses is not None:
        if len(trace.bonuses) != n:
            raise ValueError("bonuses do not align with trace steps")
        rewards = [r + b for r, b in zip(rewards, trace.bonuses)]
    out = np.empty(n)
    acc = trace.terminal_reward
    for t in range(n - 1, -1, -1):
        acc += rewards[t]
        out[t] = acc
    return out


def episode_return(trace: Trace) -> float:
    """Total return as the learner sees it, exploration bonus included."""
    total = trace.terminal_reward
    if trace.rewards is not None:
        total += sum(trace.rewards)
    if trace.bonuses is not None:
        total += sum(trace.bonuses)
    return float(total)


def entropy_of(probs: np.ndarray) -> float:
    p = np.maximum(probs, 1e-300)
    return float(-(p * np.log(p)).sum())


def policy_gradient_step(
    policy,
    traces: list[Trace],
    lr: float,
    entropy_coef: float | list[float] = 0.0,
    baseline_coef: float = BASELINE_COEF,
) -> None:
    """One summed-gradient RMSProp update of `policy` from `traces`.

    entropy_coef is a scalar or a per-trace list (mixed batches can
    weight entropy differently by episode kind).
    """
    if not policy.trainable:
        raise ValueError("policy is not trainable")
    if isinstance(entropy_coef, (int, float)):
        coefs = [float(entropy_coef)] * len(traces)
    else:
        coefs = list(entropy_coef)
        if len(coefs) != len(traces):
            raise ValueError("one entropy coefficient per trace required")
    grads = policy.grad_buffers()
    head_sizes = policy.head_sizes
    episode_returns = []
    episode_zs = []
    for trace, entropy_coef in zip(traces, coefs):
        returns = returns_from(trace)
        episode_returns.append(episode_return(trace))
        episode_zs.append(trace.z)
        for t, (_, action, cache) in enumerate(trace.steps):
            probs = cache.probs
            value = policy.step_value(cache)
            adv = returns[t] - value
            dlogits = -adv * probs
            off = 0
            for k, size in enumerate(head_sizes):
                dlogits[off + action[k]] += adv
                if entropy_coef:
                    p = np.maximum(probs[off : off + size], 1e-300)
                    logp = np.log(p)
                    h = float(-(p * logp).sum())
                    dlogits[off : off + size] -= entropy_coef * p * (logp + h)
                off += size
            if policy.value_is_learned:
                dvalue = 2.0 * baseline_coef * adv
            else:
                dvalue = 0.0
            # buffers hold descent gradients; the objective above is ascended
            policy.accumulate_step(cache, -dlogits, -dvalue, grads)
    policy.apply_grads(grads, lr)
    policy.update_baseline(episode_returns, episode_zs)


class VisitCounts:
    """Exact per-observation visit counts keyed by env.obs_key."""

    def __init__(self) -> None:
        self.counts: dict = {}

    def record(self, key) -> int:
        n = self.counts.get(key, 0) + 1
        self.counts[key] = n
        return n

    def count(self, key) -> int:
        return self.counts.get(key, 0)

    def __len__(self) -> int:
        return len(self.counts)


def exploration_bonus(alpha: float, n: int) -> float:
    """alpha / sqrt(n) for the n-th visit; n starts at 1."""
    if n <= 0:
        raise ValueError("visit count must be positive")
    return alpha / math.sqrt(n)


def attach_bonuses(trace: Trace, counts: VisitCounts, alpha: float, env) -> None:
    """Count each decision-time observation and add its bonus to the trace."""
    bonuses = []
    for obs, _, _ in trace.steps:
        n = counts.record(env.obs_key(obs))
        bonuses.append(exploration_bonus(alpha, n))
    trace.bonuses = bonuses
