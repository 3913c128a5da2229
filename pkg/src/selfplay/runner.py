"""Training loop: mixed self-play/target batches, windowed metrics,
per-seed artifacts, and across-seed aggregation.

Per seed, an output directory gains metrics_seed<k>.csv (pinned column
set), stop_hist_seed<k>.csv (handover-state histogram per metrics
window), and checkpoint_seed<k>.npz. Budgets count target episodes or
target env steps only; self-play is free. A metrics row is emitted at
every `window` target episodes, summarizing the window's target
episodes and all self-play episodes since the previous row.
"""

from __future__ import annotations

import sys
import time
import traceback
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .checkpoint import save_checkpoint
from .config import ExperimentConfig, build_env, build_policies, save_config
from .engine import REPEAT, REVERSE, SelfPlayResult, run_selfplay_episode, run_target_episode
from .learn import VisitCounts, attach_bonuses, policy_gradient_step
from .metrics import MetricsRow, read_metrics, write_aggregate, write_metrics

SELFPLAY = "selfplay"
TARGET = "target"


def mix_batch(cfg: ExperimentConfig, rng) -> list[str]:
    """Episode kinds for one update batch; kind drawn i.i.d. per episode."""
    p = cfg.selfplay_percent / 100.0
    return [SELFPLAY if rng.random() < p else TARGET for _ in range(cfg.batch_size)]


@dataclass
class CurriculumStats:
    obj_rates: tuple[float, float, float]  # exactly 1, 2, 3 distinct objects
    mean_t_a: float
    mean_t_b: float
    mean_r_a: float
    mean_r_b: float
    stop_hist: Counter


def curriculum_stats(results: list[SelfPlayResult]) -> CurriculumStats:
    """Windowed proposer diagnostics over self-play episodes."""
    n = len(results)
    if n == 0:
        nan = float("nan")
        return CurriculumStats((nan, nan, nan), nan, nan, nan, nan, Counter())
    counts = [len(r.alice_objects) for r in results]
    rates = tuple(sum(1 for c in counts if c == k) / n for k in (1, 2, 3))
    return CurriculumStats(
        obj_rates=rates,
        mean_t_a=sum(r.t_a for r in results) / n,
        mean_t_b=sum(r.t_b for r in results) / n,
        mean_r_a=sum(r.r_a for r in results) / n,
        mean_r_b=sum(r.r_b for r in results) / n,
        stop_hist=Counter(r.alice_stop_key for r in results),
    )


class _SeedRun:
    def __init__(self, cfg: ExperimentConfig, seed: int) -> None:
        self.cfg = cfg
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.env = build_env(cfg)
        self.alice, self.bob = build_policies(cfg, self.env, self.rng)
        self.counts = VisitCounts() if cfg.alpha is not None else None
        self.target_eps = 0
        self.selfplay_eps = 0
        self.target_env_steps = 0
        self.selfplay_env_steps = 0
        self.sp_index = 0
        self.rows: list[MetricsRow] = []
        self.stop_hists: list[tuple[int, Counter]] = []
        self._window_succ: list[bool] = []
        self._window_reward: list[float] = []
        self._window_sp: list[SelfPlayResult] = []

    def budget_done(self) -> bool:
        if self.cfg.budget_unit == "episodes":
            return self.target_eps >= self.cfg.budget
        # self-play steps ride free; budgets meter the target task only
        return self.target_env_steps >= self.cfg.budget

    def _sp_mode(self) -> str:
        if self.cfg.mode == "both":
            return REVERSE if self.sp_index % 2 == 0 else REPEAT
        return self.cfg.mode

    def _emit_row(self) -> None:
        cs = curriculum_stats(self._window_sp)
        hist_id = len(self.stop_hists)
        self.stop_hists.append((hist_id, cs.stop_hist))
        n = len(self._window_succ)
        self.rows.append(
            MetricsRow(
                target_eps=self.target_eps,
                selfplay_eps=self.selfplay_eps,
                success_rate=sum(self._window_succ) / n,
                mean_target_reward=sum(self._window_reward) / n,
                mean_RA=cs.mean_r_a,
                mean_RB=cs.mean_r_b,
                mean_tA=cs.mean_t_a,
                mean_tB=cs.mean_t_b,
                obj1_rate=cs.obj_rates[0],
                obj2_rate=cs.obj_rates[1],
                obj3_rate=cs.obj_rates[2],
                stop_hist_id=hist_id,
                target_env_steps=self.target_env_steps,
                selfplay_env_steps=self.selfplay_env_steps,
            )
        )
        self._window_succ = []
        self._window_reward = []
        self._window_sp = []

    def run_batch(self) -> None:
        cfg = self.cfg
        kinds = mix_batch(cfg, self.rng)
        alice_traces = []
        bob_traces = []
        bob_coefs = []
        for kind in kinds:
            if kind == SELFPLAY:
                out = run_selfplay_episode(
                    self.env, self.alice, self.bob, self._sp_mode(),
                    cfg.selfplay_t_max(), cfg.gamma, self.rng,
                    alice_step_cap=cfg.alice_step_cap,
                )
                self.sp_index += 1
                self.selfplay_eps += 1
                self.selfplay_env_steps += out.env_steps
                if self.alice.trainable:
                    alice_traces.append(out.alice)
                bob_traces.append(out.bob)
                bob_coefs.append(cfg.entropy_selfplay)
                self._window_sp.append(out)
            else:
                res = run_target_episode(self.env, self.bob, cfg.target_t_max(), self.rng)
                self.target_eps += 1
                self.target_env_steps += res.env_steps
                if self.counts is not None:
                    attach_bonuses(res.trace, self.counts, cfg.alpha, self.env)
                bob_traces.append(res.trace)
                bob_coefs.append(cfg.entropy_target)
                self._window_succ.append(res.success)
                self._window_reward.append(res.reward)
                if self.target_eps % cfg.window == 0:
                    self._emit_row()
        if alice_traces:
            policy_gradient_step(
                self.alice, alice_traces, cfg.lr,
                entropy_coef=cfg.entropy_selfplay, baseline_coef=cfg.baseline_coef,
            )
        if bob_traces:
            policy_gradient_step(
                self.bob, bob_traces, cfg.lr,
                entropy_coef=bob_coefs, baseline_coef=cfg.baseline_coef,
            )

    def counters(self) -> dict:
        return {
            "target_eps": self.target_eps,
            "selfplay_eps": self.selfplay_eps,
            "target_env_steps": self.target_env_steps,
            "selfplay_env_steps": self.selfplay_env_steps,
            "sp_index": self.sp_index,
        }


def metrics_path(out_dir: str | Path, seed: int) -> Path:
    return Path(out_dir) / f"metrics_seed{seed}.csv"


def checkpoint_path(out_dir: str | Path, seed: int) -> Path:
    return Path(out_dir) / f"checkpoint_seed{seed}.npz"


def stop_hist_path(out_dir: str | Path, seed: int) -> Path:
    return Path(out_dir) / f"stop_hist_seed{seed}.csv"


def _write_stop_hists(hists: list[tuple[int, Counter]], path: Path) -> None:
    import csv

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["window_id", "state", "count"])
        for hist_id, counter in hists:
            for key in sorted(counter, key=repr):
                w.writerow([hist_id, key, counter[key]])


def run_seed(
    cfg: ExperimentConfig, seed: int, out_dir: str | Path, verbose: bool = False
) -> list[MetricsRow]:
    run = _SeedRun(cfg, seed)
    started = time.time()
    next_report = started + 60.0
    while not run.budget_done():
        run.run_batch()
        if verbose and time.time() >= next_report:
            print(
                f"[seed {seed}] target_eps={run.target_eps} "
                f"selfplay_eps={run.selfplay_eps} rows={len(run.rows)} "
                f"elapsed={time.time() - started:.0f}s",
                file=sys.stderr,
                flush=True,
            )
            next_report = time.time() + 60.0
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_metrics(run.rows, metrics_path(out_dir, seed))
    _write_stop_hists(run.stop_hists, stop_hist_path(out_dir, seed))
    save_checkpoint(checkpoint_path(out_dir, seed), run.alice, run.bob, run.rng, run.counters())
    if verbose:
        print(
            f"[seed {seed}] done in {time.time() - started:.0f}s: "
            f"{run.target_eps} target episodes, {run.selfplay_eps} self-play",
            file=sys.stderr,
            flush=True,
        )
    return run.rows


def seed_outputs_exist(out_dir: str | Path, seed: int) -> bool:
    return (
        metrics_path(out_dir, seed).is_file()
        and stop_hist_path(out_dir, seed).is_file()
        and checkpoint_path(out_dir, seed).is_file()
    )


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path,
    seeds: tuple[int, ...] | None = None,
    verbose: bool = False,
    resume: bool = False,
) -> Path:
    """Train every seed, then write aggregate.csv from the seed files.

    With resume=True, seeds whose output files are already present are
    kept as-is instead of being retrained.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out_dir / "config.cfg")
    seed_list = seeds if seeds is not None else cfg.seeds
    per_seed = []
    for seed in seed_list:
        if resume and seed_outputs_exist(out_dir, seed):
            per_seed.append(read_metrics(metrics_path(out_dir, seed)))
            continue
        try:
            run_seed(cfg, seed, out_dir, verbose=verbose)
        except Exception as e:
            with open(out_dir / "errors.log", "a") as f:
                f.write(f"seed={seed} error={e!r}\n")
                f.write(traceback.format_exc() + "\n")
            raise
        per_seed.append(read_metrics(metrics_path(out_dir, seed)))
    agg = out_dir / "aggregate.csv"
    write_aggregate(per_seed, agg)
    return agg
