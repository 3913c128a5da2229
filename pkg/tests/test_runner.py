"""Seed loop behavior: budgets, windowing, output files, and the CLI."""

import math

import numpy as np
import pytest

from selfplay.cli import main, parse_values
from selfplay.config import ExperimentConfig, load_config, save_config
from selfplay.engine import SelfPlayResult
from selfplay.metrics import read_metrics
from selfplay.runner import (
    _SeedRun,
    checkpoint_path,
    curriculum_stats,
    metrics_path,
    run_experiment,
    run_seed,
    stop_hist_path,
)

TINY = ExperimentConfig(
    env="hallway",
    policy="tabular",
    mode="reverse",
    lr=0.1,
    batch_size=8,
    t_max=10,
    gamma=0.033,
    selfplay_percent=50.0,
    budget=3000,
    window=1000,
    m=5,
    seeds=(0, 1),
)


def test_rows_land_on_window_boundaries(tmp_path):
    rows = run_seed(TINY, 0, tmp_path)
    assert [r.target_eps for r in rows] == [1000, 2000, 3000]
    assert all(r.selfplay_eps > 0 for r in rows)
    assert rows[0].selfplay_eps < rows[-1].selfplay_eps
    # half the episodes are self-play, so roughly one per target episode
    assert 700 < rows[-1].selfplay_eps - rows[0].selfplay_eps < 2800


def test_seed_outputs_exist_and_parse(tmp_path):
    run_seed(TINY, 0, tmp_path)
    assert metrics_path(tmp_path, 0).is_file()
    assert checkpoint_path(tmp_path, 0).is_file()
    back = read_metrics(metrics_path(tmp_path, 0))
    assert len(back) == 3
    hist_lines = stop_hist_path(tmp_path, 0).read_text().strip().splitlines()
    assert hist_lines[0] == "window_id,state,count"
    assert len(hist_lines) > 3


def test_same_seed_rerun_is_byte_identical(tmp_path):
    run_seed(TINY, 0, tmp_path / "a")
    run_seed(TINY, 0, tmp_path / "b")
    a = (tmp_path / "a" / "metrics_seed0.csv").read_bytes()
    b = (tmp_path / "b" / "metrics_seed0.csv").read_bytes()
    assert a == b
    ha = (tmp_path / "a" / "stop_hist_seed0.csv").read_bytes()
    hb = (tmp_path / "b" / "stop_hist_seed0.csv").read_bytes()
    assert ha == hb


def test_different_seeds_differ(tmp_path):
    rows0 = run_seed(TINY, 0, tmp_path / "s0")
    rows1 = run_seed(TINY, 1, tmp_path / "s1")
    assert any(
        x.success_rate != y.success_rate or x.selfplay_eps != y.selfplay_eps
        for x, y in zip(rows0, rows1)
    )


def test_pure_target_run_has_no_selfplay(tmp_path):
    cfg = ExperimentConfig(
        env="hallway", mode="none", selfplay_percent=0.0, budget=2000,
        window=1000, m=5, batch_size=8, t_max=10,
    )
    rows = run_seed(cfg, 0, tmp_path)
    assert all(r.selfplay_eps == 0 for r in rows)
    assert all(math.isnan(r.mean_RA) for r in rows)
    assert all(math.isnan(r.obj1_rate) for r in rows)


def test_env_step_budget_meters_target_steps_only():
    cfg = ExperimentConfig(
        env="hallway", mode="reverse", selfplay_percent=50.0, budget=2000,
        budget_unit="env_steps", window=100, m=5, batch_size=8, t_max=10,
    )
    run = _SeedRun(cfg, 0)
    while not run.budget_done():
        run.run_batch()
    counters = run.counters()
    assert counters["target_env_steps"] >= 2000
    # the budget check sits between batches, so one batch of overshoot at most
    assert counters["target_env_steps"] < 2000 + 8 * 10
    # self-play steps accrue but do not count against the budget
    assert counters["selfplay_env_steps"] > 0
    # emitted rows stop at the last full window before the budget
    assert run.rows[-1].target_env_steps <= counters["target_env_steps"]


def test_both_mode_alternates_selfplay_flavors():
    cfg = ExperimentConfig(
        env="hallway", mode="both", selfplay_percent=50.0, m=5, batch_size=8,
        t_max=10,
    )
    run = _SeedRun(cfg, 0)
    seen = []
    for _ in range(6):
        seen.append(run._sp_mode())
        run.sp_index += 1
    assert seen == ["reverse", "repeat", "reverse", "repeat", "reverse", "repeat"]


def test_curriculum_stats_counts_distinct_objects():
    def fake(objs):
        return SelfPlayResult(
            alice=None, bob=None, t_a=2, t_b=1, success=True, r_a=0.1, r_b=-0.1,
            env_steps=3, s_star_key=0, alice_stop_key=1,
            alice_objects=frozenset(objs),
        )

    stats = curriculum_stats([fake({"light"}), fake({"light", "key"}), fake(())])
    assert stats.obj_rates == (1 / 3, 1 / 3, 0.0)
    assert stats.mean_t_a == 2.0
    assert stats.stop_hist == {1: 3}

    empty = curriculum_stats([])
    assert all(math.isnan(r) for r in empty.obj_rates)
    assert math.isnan(empty.mean_t_a)


def test_experiment_writes_config_and_aggregate(tmp_path):
    agg = run_experiment(TINY, tmp_path, verbose=False)
    assert agg == tmp_path / "aggregate.csv"
    assert (tmp_path / "config.cfg").is_file()
    assert load_config(tmp_path / "config.cfg") == TINY
    for seed in (0, 1):
        assert metrics_path(tmp_path, seed).is_file()
    header = agg.read_text().splitlines()[0].split(",")
    assert header[0] == "target_eps"
    assert "success_rate_mean" in header


def test_experiment_resume_keeps_finished_seeds(tmp_path):
    run_seed(TINY, 0, tmp_path)
    marker = metrics_path(tmp_path, 0).read_bytes()
    before = metrics_path(tmp_path, 0).stat().st_mtime_ns
    run_experiment(TINY, tmp_path, resume=True)
    # seed 0 untouched, seed 1 trained, aggregate covers both
    assert metrics_path(tmp_path, 0).stat().st_mtime_ns == before
    assert metrics_path(tmp_path, 0).read_bytes() == marker
    assert metrics_path(tmp_path, 1).is_file()
    assert (tmp_path / "aggregate.csv").is_file()


def test_parse_values_forms():
    assert parse_values("0.1,0.5,0.9") == [0.1, 0.5, 0.9]
    assert parse_values("0..1..0.5") == [0.0, 0.5, 1.0]
    assert parse_values("0..1") == pytest.approx([i / 10 for i in range(11)])
    with pytest.raises(ValueError):
        parse_values("1..2..0")
    with pytest.raises(ValueError):
        parse_values("1..2..3..4")


def test_cli_run_and_show(tmp_path, capsys):
    cfg_path = tmp_path / "tiny.cfg"
    save_config(TINY, cfg_path)
    out = tmp_path / "out"
    code = main(
        ["run", "--config", str(cfg_path), "--seeds", "1", "--out", str(out), "--quiet"]
    )
    assert code == 0
    assert (out / "aggregate.csv").is_file()
    assert not (out / "metrics_seed1.csv").exists()  # seed override trims to 0

    code = main(["show", "--out", str(out)])
    assert code == 0
    shown = capsys.readouterr().out
    assert "success_rate_mean" in shown
    assert "3000" in shown


def test_cli_sweep_over_integer_param(tmp_path):
    cfg_path = tmp_path / "tiny.cfg"
    save_config(
        ExperimentConfig(
            env="hallway", mode="none", selfplay_percent=0.0, budget=500,
            window=500, m=5, batch_size=8, t_max=10, seeds=(0,),
        ),
        cfg_path,
    )
    out = tmp_path / "sweep"
    code = main(
        [
            "sweep", "--config", str(cfg_path), "--param", "m",
            "--values", "5,7", "--out", str(out), "--quiet",
        ]
    )
    assert code == 0
    assert (out / "m_5" / "aggregate.csv").is_file()
    assert (out / "m_7" / "aggregate.csv").is_file()
    assert (out / "sweep.csv").read_text().splitlines()[0] == "m,out_dir"


def test_cli_verify_reports_fastness(tmp_path, capsys):
    out = tmp_path / "out"
    run_seed(TINY, 0, out)
    cfg_path = tmp_path / "tiny.cfg"
    save_config(TINY, cfg_path)
    code = main(
        [
            "verify", "--config", str(cfg_path),
            "--checkpoint", str(checkpoint_path(out, 0)),
            "--episodes", "50",
        ]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "fastness:" in text
    assert "/25 pairs" in text
    assert "proposer reward:" in text


def test_cli_verify_enforces_pass_rate(tmp_path):
    out = tmp_path / "out"
    run_seed(TINY, 0, out)
    cfg_path = tmp_path / "tiny.cfg"
    save_config(TINY, cfg_path)
    code = main(
        [
            "verify", "--config", str(cfg_path),
            "--checkpoint", str(checkpoint_path(out, 0)),
            "--episodes", "10", "--slack", "0", "--min-pass-rate", "1.1",
        ]
    )
    assert code == 1
