"""Command-line front end: run experiments, sweep one parameter, verify
a checkpoint against the brute-force oracle, and display aggregates.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .checkpoint import load_checkpoint
from .config import ExperimentConfig, build_env, build_policies, load_config, with_overrides
from .metrics import compute_speedup  # noqa: F401  (re-exported for scripting)
from .oracle import (
    compute_distances,
    estimate_alice_reward,
    pass_rate,
    verify_bob_fastness,
    write_fastness_report,
)
from .runner import run_experiment


def parse_values(spec: str) -> list[float]:
    """`a,b,c` or `a..b` or `a..b..step` (inclusive, default step 0.1)."""
    if ".." in spec:
        parts = spec.split("..")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad range {spec!r}")
        a, b = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 0.1
        if step <= 0:
            raise ValueError("range step must be positive")
        out = []
        k = 0
        while True:
            v = round(a + k * step, 10)
            if v > b + 1e-9:
                break
            out.append(v)
            k += 1
        return out
    return [float(p) for p in spec.split(",") if p.strip() != ""]


def _coerce(cfg: ExperimentConfig, param: str, value: float):
    for f in fields(cfg):
        if f.name == param:
            current = getattr(cfg, param)
            if isinstance(current, bool):
                return bool(value)
            if isinstance(current, int):
                return int(value)
            return float(value)
    raise SystemExit(f"unknown config parameter {param!r}")


def _seed_override(args) -> tuple[int, ...] | None:
    if args.seeds is None:
        return None
    return tuple(range(args.seeds))


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    seeds = _seed_override(args)
    if seeds is not None:
        cfg = with_overrides(cfg, seeds=seeds)
    agg = run_experiment(cfg, args.out, verbose=not args.quiet)
    print(f"aggregate written to {agg}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    seeds = _seed_override(args)
    if seeds is not None:
        cfg = with_overrides(cfg, seeds=seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in parse_values(args.values):
        coerced = _coerce(cfg, args.param, value)
        sub = out / f"{args.param}_{coerced}"
        run_cfg = with_overrides(cfg, **{args.param: coerced})
        run_experiment(run_cfg, sub, verbose=not args.quiet)
        rows.append((coerced, sub))
        print(f"{args.param}={coerced}: {sub / 'aggregate.csv'}")
    with open(out / "sweep.csv", "w") as f:
        f.write(f"{args.param},out_dir\n")
        for value, sub in rows:
            f.write(f"{value},{sub.name}\n")
    return 0


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    rng = np.random.default_rng(args.seed)
    env = build_env(cfg)
    alice, bob = build_policies(cfg, env, rng)
    load_checkpoint(args.checkpoint, alice, bob)
    env.reset_selfplay(rng)

    code = 0
    try:
        oracle = compute_distances(env)
    except NotImplementedError:
        print(f"{env.name}: no finite state enumeration; skipping fastness check")
        oracle = None
    if oracle is not None:
        rows = verify_bob_fastness(
            env, bob, rng, slack=args.slack, rollout_cap=cfg.target_t_max(), oracle=oracle
        )
        rate = pass_rate(rows)
        print(
            f"fastness: {sum(r.passed for r in rows)}/{len(rows)} pairs "
            f"within slack {args.slack} ({rate:.3f})"
        )
        if args.report:
            write_fastness_report(rows, args.report)
            print(f"report written to {args.report}")
        if rate < args.min_pass_rate:
            code = 1
    mean, se = estimate_alice_reward(
        env, alice, bob, cfg.mode if cfg.mode in ("reverse", "repeat") else "reverse",
        cfg.selfplay_t_max(), cfg.gamma, rng, args.episodes,
        alice_step_cap=cfg.alice_step_cap,
    )
    print(f"proposer reward: mean {mean:.6f} (stderr {se:.6f}) over {args.episodes} episodes")
    return code


def cmd_show(args) -> int:
    path = Path(args.out) / "aggregate.csv"
    if not path.exists():
        raise SystemExit(f"no aggregate at {path}")
    with open(path) as f:
        header = f.readline().strip().split(",")
        rows = [line.strip().split(",") for line in f if line.strip()]
    want = [
        "target_eps",
        "selfplay_eps_mean",
        "success_rate_mean",
        "success_rate_std",
        "mean_target_reward_mean",
        "mean_target_reward_std",
        "mean_tA_mean",
    ]
    idx = [header.index(c) for c in want if c in header]
    names = [header[i] for i in idx]
    widths = [max(len(n), 12) for n in names]
    print("  ".join(n.rjust(w) for n, w in zip(names, widths)))
    for row in rows:
        cells = []
        for i, w in zip(idx, widths):
            v = row[i]
            try:
                v = f"{float(v):.4g}"
            except ValueError:
                pass
            cells.append(v.rjust(w))
        print("  ".join(cells))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selfplay")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train all seeds of one config")
    run.add_argument("--config", required=True)
    run.add_argument("--seeds", type=int, help="use seeds 0..n-1 instead of the config's")
    run.add_argument("--out", required=True)
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run the config once per parameter value")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--param", required=True)
    sweep.add_argument("--values", required=True, help="a,b,c or a..b[..step]")
    sweep.add_argument("--seeds", type=int)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--quiet", action="store_true")
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="oracle checks on a trained checkpoint")
    verify.add_argument("--config", required=True)
    verify.add_argument("--checkpoint", required=True)
    verify.add_argument("--slack", type=int, default=2)
    verify.add_argument("--episodes", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--report", help="write per-pair CSV here")
    verify.add_argument("--min-pass-rate", type=float, default=0.0)
    verify.set_defaults(func=cmd_verify)

    show = sub.add_parser("show", help="print the aggregate table of a run directory")
    show.add_argument("--out", required=True)
    show.set_defaults(func=cmd_show)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
