"""Windowed training metrics, CSV persistence, and the speedup measure.

The per-seed CSV column set is fixed; floats are written with repr() so
a rerun with the same seed produces a byte-identical file. Self-play
columns hold nan for windows containing no self-play episodes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

CSV_HEADER = (
    "target_eps,selfplay_eps,success_rate,mean_target_reward,"
    "mean_RA,mean_RB,mean_tA,mean_tB,obj1_rate,obj2_rate,obj3_rate"
)
_COLUMNS = CSV_HEADER.split(",")


@dataclass
class MetricsRow:
    target_eps: int
    selfplay_eps: int
    success_rate: float
    mean_target_reward: float
    mean_RA: float
    mean_RB: float
    mean_tA: float
    mean_tB: float
    obj1_rate: float
    obj2_rate: float
    obj3_rate: float
    # bookkeeping outside the pinned CSV columns
    stop_hist_id: int = 0
    target_env_steps: int = 0
    selfplay_env_steps: int = 0

    def csv_values(self) -> list[str]:
        out = []
        for name in _COLUMNS:
            v = getattr(self, name)
            out.append(str(v) if isinstance(v, int) else repr(float(v)))
        return out


def write_metrics(rows: list[MetricsRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        f.write(CSV_HEADER + "\n")
        for row in rows:
            f.write(",".join(row.csv_values()) + "\n")


def read_metrics(path: str | Path) -> list[MetricsRow]:
    rows = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != _COLUMNS:
            raise ValueError(f"unexpected metrics header in {path}")
        for rec in reader:
            vals = dict(zip(_COLUMNS, rec))
            rows.append(
                MetricsRow(
                    target_eps=int(vals["target_eps"]),
                    selfplay_eps=int(vals["selfplay_eps"]),
                    **{k: float(vals[k]) for k in _COLUMNS[2:]},
                )
            )
    return rows


def write_aggregate(per_seed: list[list[MetricsRow]], path: str | Path) -> None:
    """Across-seed mean and std for each metric, aligned by row index.

    Seeds can produce different row counts under a step budget; only the
    common prefix is aggregated. Sample std (ddof=1), 0 for one seed.
    """
    n_rows = min(len(rows) for rows in per_seed)
    with open(path, "w", newline="") as f:
        names = _COLUMNS[:1] + [
            f"{c}_{suffix}" for c in _COLUMNS[1:] for suffix in ("mean", "std")
        ]
        f.write(",".join(names) + "\n")
        for i in range(n_rows):
            cells = [str(per_seed[0][i].target_eps)]
            for c in _COLUMNS[1:]:
                xs = [float(getattr(rows[i], c)) for rows in per_seed]
                cells.append(repr(_mean(xs)))
                cells.append(repr(_std(xs)))
            f.write(",".join(cells) + "\n")


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs)


def _std(xs: list[float]) -> float:
    if len(xs) < 2:
        return 0.0
    mu = _mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / (len(xs) - 1))


def reward_curve(rows: list[MetricsRow]) -> list[tuple[int, float]]:
    return [(r.target_eps, r.mean_target_reward) for r in rows]


def success_curve(rows: list[MetricsRow]) -> list[tuple[int, float]]:
    return [(r.target_eps, r.success_rate) for r in rows]


def first_crossing(curve: list[tuple[int, float]], threshold: float) -> int | None:
    """First episode count whose value rises strictly above threshold."""
    for eps, value in curve:
        if value > threshold:
            return eps
    return None


def compute_speedup(
    selfplay_curve: list[tuple[int, float]],
    baseline_curve: list[tuple[int, float]],
    threshold: float,
) -> float:
    """Ratio of baseline episodes to self-play episodes to reach threshold.

    A self-play run that never reaches the threshold scores 1. A
    baseline that never reaches it is censored at its final budget, so a
    successful self-play run still shows a factor above one.
    """
    sp = first_crossing(selfplay_curve, threshold)
    if sp is None:
        return 1.0
    base = first_crossing(baseline_curve, threshold)
    if base is None:
        if not baseline_curve:
            return 1.0
        base = baseline_curve[-1][0]
    return base / sp
