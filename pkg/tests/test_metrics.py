"""Metrics CSV persistence, curves, crossings, and the speedup measure."""

import numpy as np
import pytest

from selfplay.config import ExperimentConfig
from selfplay.metrics import (
    CSV_HEADER,
    MetricsRow,
    compute_speedup,
    first_crossing,
    read_metrics,
    reward_curve,
    success_curve,
    write_aggregate,
    write_metrics,
)
from selfplay.runner import mix_batch


def row(eps, succ=0.0, rew=0.0, **kw):
    base = dict(
        target_eps=eps,
        selfplay_eps=eps // 2,
        success_rate=succ,
        mean_target_reward=rew,
        mean_RA=0.1,
        mean_RB=-0.2,
        mean_tA=3.0,
        mean_tB=4.0,
        obj1_rate=0.0,
        obj2_rate=0.0,
        obj3_rate=0.0,
    )
    base.update(kw)
    return MetricsRow(**base)


def test_header_is_pinned():
    assert CSV_HEADER == (
        "target_eps,selfplay_eps,success_rate,mean_target_reward,"
        "mean_RA,mean_RB,mean_tA,mean_tB,obj1_rate,obj2_rate,obj3_rate"
    )


def test_roundtrip_preserves_values(tmp_path):
    rows = [row(1000, succ=0.25, rew=-0.875), row(2000, succ=1 / 3, rew=-0.5)]
    path = tmp_path / "metrics.csv"
    write_metrics(rows, path)
    back = read_metrics(path)
    assert [r.target_eps for r in back] == [1000, 2000]
    assert back[0].success_rate == 0.25
    assert back[1].success_rate == 1 / 3  # repr roundtrip is exact
    assert back[1].mean_target_reward == -0.5


def test_write_is_byte_deterministic(tmp_path):
    rows = [row(1000, succ=0.123456789), row(2000, rew=float("nan"))]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_metrics(rows, a)
    write_metrics(rows, b)
    assert a.read_bytes() == b.read_bytes()


def test_wrong_header_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("target_eps,success\n1000,0.5\n")
    with pytest.raises(ValueError):
        read_metrics(path)


def test_aggregate_means_and_sample_std(tmp_path):
    seed_a = [row(1000, succ=0.2), row(2000, succ=0.6)]
    seed_b = [row(1000, succ=0.4), row(2000, succ=1.0)]
    path = tmp_path / "aggregate.csv"
    write_aggregate([seed_a, seed_b], path)
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "target_eps"
    assert "success_rate_mean" in header and "success_rate_std" in header
    first = dict(zip(header, lines[1].split(",")))
    second = dict(zip(header, lines[2].split(",")))
    assert float(first["success_rate_mean"]) == pytest.approx(0.3)
    assert float(first["success_rate_std"]) == pytest.approx(np.std([0.2, 0.4], ddof=1))
    assert float(second["success_rate_mean"]) == pytest.approx(0.8)


def test_aggregate_uses_common_prefix(tmp_path):
    seed_a = [row(1000), row(2000), row(3000)]
    seed_b = [row(1000), row(2000)]
    path = tmp_path / "aggregate.csv"
    write_aggregate([seed_a, seed_b], path)
    assert len(path.read_text().strip().splitlines()) == 3  # header + 2 rows


def test_curves_pick_their_columns():
    rows = [row(1000, succ=0.1, rew=-3.0), row(2000, succ=0.9, rew=-1.0)]
    assert success_curve(rows) == [(1000, 0.1), (2000, 0.9)]
    assert reward_curve(rows) == [(1000, -3.0), (2000, -1.0)]


def test_first_crossing_is_strictly_above():
    curve = [(1000, -5.0), (2000, -2.0), (3000, -1.5)]
    assert first_crossing(curve, -2.0) == 3000  # equality does not cross
    assert first_crossing(curve, -1.5) is None
    assert first_crossing(curve, -6.0) == 1000


def test_speedup_ratio_of_crossings():
    sp = [(1000, -1.0), (2000, -0.5)]
    base = [(1000, -5.0), (2000, -5.0), (4000, -1.0)]
    assert compute_speedup(sp, base, threshold=-2.0) == 4.0


def test_speedup_is_one_when_selfplay_never_crosses():
    sp = [(1000, -5.0), (2000, -5.0)]
    base = [(1000, -1.0)]
    assert compute_speedup(sp, base, threshold=-2.0) == 1.0


def test_speedup_censors_unconverged_baseline_at_budget():
    sp = [(1000, -1.0)]
    base = [(1000, -5.0), (8000, -5.0)]
    assert compute_speedup(sp, base, threshold=-2.0) == 8.0


def test_mix_fractions_follow_percentage():
    cfg = ExperimentConfig(
        env="lightkey", policy="neural", mode="both", selfplay_percent=20.0,
        batch_size=256,
    )
    rng = np.random.default_rng(0)
    counts = [sum(k == "selfplay" for k in mix_batch(cfg, rng)) for _ in range(400)]
    # binomial(256, 0.2): mean 51.2, se of the mean over 400 draws ~ 0.32
    assert abs(np.mean(counts) - 51.2) < 1.3
    assert all(k in ("selfplay", "target") for k in mix_batch(cfg, rng))


def test_mix_zero_percent_is_all_target():
    cfg = ExperimentConfig(env="hallway", mode="none", selfplay_percent=0.0)
    rng = np.random.default_rng(0)
    assert set(mix_batch(cfg, rng)) == {"target"}
