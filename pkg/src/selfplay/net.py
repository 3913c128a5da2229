"""Two-hidden-layer tanh MLP with categorical action heads, a scalar
value head, and RMSProp. All arithmetic is float64 so gradient checks
are exact to finite-difference tolerance.

The hot path (per-step forward, per-step backward accumulation) is JIT
compiled with numba; set SELFPLAY_NO_NUMBA=1 to run the same code as
plain Python.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

if os.environ.get("SELFPLAY_NO_NUMBA"):

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

else:
    from numba import njit


@dataclass
class MlpParams:
    """Weight arrays; heads are packed into one output block."""

    w1: np.ndarray  # (in_dim, h1)
    b1: np.ndarray  # (h1,)
    w2: np.ndarray  # (h1, h2)
    b2: np.ndarray  # (h2,)
    wh: np.ndarray  # (h2, sum(head_sizes))
    bh: np.ndarray  # (sum(head_sizes),)
    wv: np.ndarray  # (h2,)
    bv: np.ndarray  # (1,)
    head_sizes: tuple[int, ...]

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.w1, self.b1, self.w2, self.b2, self.wh, self.bh, self.wv, self.bv)

    @property
    def in_dim(self) -> int:
        return self.w1.shape[0]

    def n_params(self) -> int:
        return sum(a.size for a in self.arrays())

    def copy(self) -> "MlpParams":
        return MlpParams(*(a.copy() for a in self.arrays()), head_sizes=self.head_sizes)


@dataclass
class RmspropState:
    """Per-parameter running mean of squared gradients."""

    m: tuple[np.ndarray, ...]
    decay: float = 0.97
    eps: float = 1e-6

    @classmethod
    def for_params(cls, arrays: tuple[np.ndarray, ...]) -> "RmspropState":
        return cls(m=tuple(np.zeros_like(a) for a in arrays))


@dataclass
class ForwardCache:
    """Everything backward needs; idx is None for dense inputs."""

    idx: np.ndarray | None
    x: np.ndarray | None
    h1: np.ndarray
    h2: np.ndarray
    probs: np.ndarray  # packed per-head distributions
    value: float


def init_mlp(
    rng,
    in_dim: int,
    head_sizes: tuple[int, ...],
    hidden: tuple[int, int] = (50, 50),
    init_std: float = 0.2,
) -> MlpParams:
    """All parameters drawn i.i.d. from N(0, init_std^2)."""
    h1, h2 = hidden
    total = int(sum(head_sizes))

    def draw(*shape):
        return rng.normal(0.0, init_std, size=shape)

    return MlpParams(
        w1=draw(in_dim, h1),
        b1=draw(h1),
        w2=draw(h1, h2),
        b2=draw(h2),
        wh=draw(h2, total),
        bh=draw(total),
        wv=draw(h2),
        bv=draw(1),
        head_sizes=tuple(int(s) for s in head_sizes),
    )


def zero_grads(params: MlpParams) -> tuple[np.ndarray, ...]:
    return tuple(np.zeros_like(a) for a in params.arrays())


# -- kernels ----------------------------------------------------------------


@njit(cache=True)
def _softmax_heads(logits, head_sizes):
    probs = np.empty_like(logits)
    off = 0
    for k in range(head_sizes.size):
        size = head_sizes[k]
        hi = logits[off]
        for i in range(1, size):
            if logits[off + i] > hi:
                hi = logits[off + i]
        total = 0.0
        for i in range(size):
            e = np.exp(logits[off + i] - hi)
            probs[off + i] = e
            total += e
        for i in range(size):
            probs[off + i] /= total
        off += size
    return probs


@njit(cache=True)
def _forward_tail(h1, w2, b2, wh, bh, wv, bv, head_sizes):
    h2 = np.tanh(h1 @ w2 + b2)
    logits = h2 @ wh + bh
    probs = _softmax_heads(logits, head_sizes)
    v = h2 @ wv + bv[0]
    return h2, probs, v


@njit(cache=True)
def _forward_sparse(pre, w1, w2, b2, wh, bh, wv, bv, idx, head_sizes):
    z1 = pre.copy()
    for j in range(idx.size):
        z1 += w1[idx[j]]
    h1 = np.tanh(z1)
    h2, probs, v = _forward_tail(h1, w2, b2, wh, bh, wv, bv, head_sizes)
    return h1, h2, probs, v


@njit(cache=True)
def _forward_dense(x, w1, b1, w2, b2, wh, bh, wv, bv, head_sizes):
    h1 = np.tanh(x @ w1 + b1)
    h2, probs, v = _forward_tail(h1, w2, b2, wh, bh, wv, bv, head_sizes)
    return h1, h2, probs, v


@njit(cache=True)
def _backward_common(h1, h2, dlogits, dv, w2, wh, wv, gw2, gb2, gwh, gbh, gwv, gbv):
    gbh += dlogits
    gwh += np.outer(h2, dlogits)
    gwv += h2 * dv
    gbv[0] += dv
    dh2 = wh @ dlogits + wv * dv
    dz2 = dh2 * (1.0 - h2 * h2)
    gw2 += np.outer(h1, dz2)
    gb2 += dz2
    dh1 = w2 @ dz2
    dz1 = dh1 * (1.0 - h1 * h1)
    return dz1


@njit(cache=True)
def _backward_sparse(idx, h1, h2, dlogits, dv, w2, wh, wv, gw1, gb1, gw2, gb2, gwh, gbh, gwv, gbv):
    dz1 = _backward_common(h1, h2, dlogits, dv, w2, wh, wv, gw2, gb2, gwh, gbh, gwv, gbv)
    gb1 += dz1
    for j in range(idx.size):
        gw1[idx[j]] += dz1


@njit(cache=True)
def _backward_dense(x, h1, h2, dlogits, dv, w2, wh, wv, gw1, gb1, gw2, gb2, gwh, gbh, gwv, gbv):
    dz1 = _backward_common(h1, h2, dlogits, dv, w2, wh, wv, gw2, gb2, gwh, gbh, gwv, gbv)
    gb1 += dz1
    gw1 += np.outer(x, dz1)


# -- public surface ---------------------------------------------------------


def goal_precompute(params: MlpParams, goal_idx, z: int) -> np.ndarray:
    """First-layer contribution of the fixed goal segment plus the z bit.

    The z bit lives in the last input row. Reused across every step of an
    episode, which is what makes the sparse path cheap.
    """
    pre = params.b1.copy()
    for i in goal_idx:
        pre += params.w1[i]
    if z:
        pre += params.w1[params.in_dim - 1]
    return pre


def forward_sparse(params: MlpParams, pre: np.ndarray, cur_idx: np.ndarray) -> ForwardCache:
    h1, h2, probs, v = _forward_sparse(
        pre, params.w1, params.w2, params.b2, params.wh, params.bh,
        params.wv, params.bv, cur_idx, np.asarray(params.head_sizes, dtype=np.int64),
    )
    return ForwardCache(idx=cur_idx, x=None, h1=h1, h2=h2, probs=probs, value=float(v))


def mlp_forward(params: MlpParams, x: np.ndarray) -> tuple[list[np.ndarray], float, ForwardCache]:
    """Dense forward over a fully assembled input vector.

    Returns per-head distributions, the baseline value, and the cache for
    mlp_backward.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (params.in_dim,):
        raise ValueError(f"input shape {x.shape} does not match ({params.in_dim},)")
    h1, h2, probs, v = _forward_dense(
        x, params.w1, params.b1, params.w2, params.b2, params.wh, params.bh,
        params.wv, params.bv, np.asarray(params.head_sizes, dtype=np.int64),
    )
    cache = ForwardCache(idx=None, x=x, h1=h1, h2=h2, probs=probs, value=float(v))
    return split_heads(probs, params.head_sizes), float(v), cache


def split_heads(packed: np.ndarray, head_sizes: tuple[int, ...]) -> list[np.ndarray]:
    out, off = [], 0
    for s in head_sizes:
        out.append(packed[off : off + s])
        off += s
    return out


def mlp_backward_into(
    params: MlpParams,
    cache: ForwardCache,
    dlogits: np.ndarray,
    dvalue: float,
    grads: tuple[np.ndarray, ...],
) -> None:
    """Accumulate d(objective)/d(params) given upstream signals.

    dlogits is the gradient w.r.t. the packed pre-softmax logits; dvalue
    w.r.t. the value head output.
    """
    gw1, gb1, gw2, gb2, gwh, gbh, gwv, gbv = grads
    if cache.idx is not None:
        _backward_sparse(
            cache.idx, cache.h1, cache.h2, dlogits, dvalue, params.w2, params.wh,
            params.wv, gw1, gb1, gw2, gb2, gwh, gbh, gwv, gbv,
        )
    else:
        _backward_dense(
            cache.x, cache.h1, cache.h2, dlogits, dvalue, params.w2, params.wh,
            params.wv, gw1, gb1, gw2, gb2, gwh, gbh, gwv, gbv,
        )


def mlp_backward(
    params: MlpParams, cache: ForwardCache, dlogits: np.ndarray, dvalue: float
) -> tuple[np.ndarray, ...]:
    grads = zero_grads(params)
    mlp_backward_into(params, cache, dlogits, dvalue, grads)
    return grads


def rmsprop_update(
    arrays: tuple[np.ndarray, ...],
    grads: tuple[np.ndarray, ...],
    state: RmspropState,
    lr: float,
) -> None:
    """m <- decay*m + (1-decay)*g^2; theta <- theta - lr*g/sqrt(m + eps)."""
    decay, eps = state.decay, state.eps
    for th, g, m in zip(arrays, grads, state.m):
        m *= decay
        m += (1.0 - decay) * g * g
        th -= lr * g / np.sqrt(m + eps)
