"""Versioned .npz checkpoints: policy parameters, optimizer state, RNG
state, and episode counters.

Layout (format version 1): a `meta` JSON scalar records the format
version and each mind's kind; per mind, `<prefix>_arr_<i>` holds its
parameter arrays and `<prefix>_m_<i>` the matching RMSProp accumulators
(tabular minds add `<prefix>_baseline`); `rng` is the bit-generator
state as JSON; `counters` is a JSON object of run counters.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .policy import NeuralPolicy, RandomPolicy, TabularPolicy

FORMAT_VERSION = 1


def _kind(policy) -> str:
    if isinstance(policy, TabularPolicy):
        return "tabular"
    if isinstance(policy, NeuralPolicy):
        return "neural"
    if isinstance(policy, RandomPolicy):
        return "random"
    raise TypeError(f"cannot checkpoint {type(policy).__name__}")


def _param_arrays(policy) -> tuple[np.ndarray, ...]:
    if isinstance(policy, TabularPolicy):
        return (policy.table,)
    return policy.params.arrays()


def save_checkpoint(path: str | Path, alice, bob, rng, counters: dict) -> None:
    payload: dict[str, np.ndarray] = {}
    meta = {"format_version": FORMAT_VERSION, "minds": {}}
    for prefix, policy in (("alice", alice), ("bob", bob)):
        kind = _kind(policy)
        meta["minds"][prefix] = kind
        if kind == "random":
            continue
        arrays = _param_arrays(policy)
        for i, a in enumerate(arrays):
            payload[f"{prefix}_arr_{i}"] = a
        for i, m in enumerate(policy.opt.m):
            payload[f"{prefix}_m_{i}"] = m
        if kind == "tabular":
            payload[f"{prefix}_baseline"] = np.asarray(policy.baselines)
    payload["meta"] = np.array(json.dumps(meta))
    payload["rng"] = np.array(json.dumps(rng.bit_generator.state))
    payload["counters"] = np.array(json.dumps(counters))
    np.savez(path, **payload)


def load_checkpoint(path: str | Path, alice, bob, rng=None) -> dict:
    """Restore minds (and optionally the RNG) in place; returns counters."""
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        if meta.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version in {path}")
        for prefix, policy in (("alice", alice), ("bob", bob)):
            kind = _kind(policy)
            stored = meta["minds"].get(prefix)
            if stored != kind:
                raise ValueError(
                    f"checkpoint holds a {stored} {prefix}, run configures {kind}"
                )
            if kind == "random":
                continue
            arrays = _param_arrays(policy)
            for i, a in enumerate(arrays):
                src = z[f"{prefix}_arr_{i}"]
                if src.shape != a.shape:
                    raise ValueError(f"shape mismatch for {prefix} parameter {i}")
                a[...] = src
            for i, m in enumerate(policy.opt.m):
                m[...] = z[f"{prefix}_m_{i}"]
            if kind == "tabular":
                policy.baselines = [float(v) for v in z[f"{prefix}_baseline"]]
        if rng is not None:
            rng.bit_generator.state = json.loads(str(z["rng"]))
        return json.loads(str(z["counters"]))
