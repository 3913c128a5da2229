"""Long-horizon campaigns backing the end-to-end acceptance checks.

The heavy training runs (hallway curriculum arms, the exploration-bonus
sweep, light-key speedup arms, mountain car) are executed once and cached
under ``var/acceptance/<cell>/``.  A cell is complete when its directory
holds a ``config.cfg`` matching the cell's exact configuration plus the
per-seed metrics and the aggregate; stale or partial cells are wiped and
rerun.  ``tests/test_acceptance.py`` evaluates the criteria against this
cache and skips the campaign-backed ones when cells are missing.

Run everything (sequentially; light-key dominates the wall clock):

    python3 -m selfplay.acceptance --verbose

or a subset:

    python3 -m selfplay.acceptance --only c3_selfplay,c3_plain
"""

from __future__ import annotations

import argparse
import shutil
import sys
import time
from pathlib import Path

from .config import ExperimentConfig, config_to_text, load_preset, with_overrides
from .metrics import read_metrics
from .runner import metrics_path, run_experiment

DEFAULT_ROOT = Path("var/acceptance")

ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
ALPHA_SELECT_BUDGET = 200_000
SWEEP_SEEDS = (0, 1, 2)


def _hallway(**kv) -> ExperimentConfig:
    return with_overrides(load_preset("hallway"), **kv)


def _lightkey(**kv) -> ExperimentConfig:
    return with_overrides(load_preset("lightkey"), **kv)


def _mountaincar(**kv) -> ExperimentConfig:
    return with_overrides(load_preset("mountaincar"), **kv)


def alpha_cell_name(alpha: float) -> str:
    return f"c4_alpha{int(round(alpha * 10)):02d}"


def cell_configs() -> dict[str, ExperimentConfig]:
    """Every static campaign cell, keyed by cache directory name."""
    cells = {
        # hallway curriculum arms (criteria 3 and 5)
        "c3_selfplay": _hallway(),
        "c3_plain": _hallway(mode="none", selfplay_percent=0.0),
        "c3_random": _hallway(random_alice=True),
        # light-key speedup arms (criterion 6)
        "c6_repeat": _lightkey(mode="repeat"),
        "c6_target": _lightkey(mode="none", selfplay_percent=0.0),
        # light-off bias sweep (criterion 7); repeat p=0.5 reuses c6_repeat
        "c7_reverse_p01": _lightkey(mode="reverse", p_light_off=0.1, seeds=SWEEP_SEEDS),
        "c7_reverse_p05": _lightkey(mode="reverse", p_light_off=0.5, seeds=SWEEP_SEEDS),
        "c7_reverse_p09": _lightkey(mode="reverse", p_light_off=0.9, seeds=SWEEP_SEEDS),
        "c7_repeat_p01": _lightkey(mode="repeat", p_light_off=0.1, seeds=SWEEP_SEEDS),
        "c7_repeat_p09": _lightkey(mode="repeat", p_light_off=0.9, seeds=SWEEP_SEEDS),
        # mountain car arms (criterion 8)
        "c8_selfplay": _mountaincar(),
        "c8_plain": _mountaincar(mode="none", selfplay_percent=0.0),
    }
    # exploration-bonus sweep, selected at the reduced budget (criterion 4)
    for alpha in ALPHA_GRID:
        cells[alpha_cell_name(alpha)] = _hallway(
            mode="none",
            selfplay_percent=0.0,
            alpha=alpha,
            budget=ALPHA_SELECT_BUDGET,
            seeds=SWEEP_SEEDS,
        )
    return cells


def is_complete(root: Path, name: str, cfg: ExperimentConfig) -> bool:
    cell = root / name
    saved = cell / "config.cfg"
    if not saved.is_file() or saved.read_text(encoding="utf-8") != config_to_text(cfg):
        return False
    if not (cell / "aggregate.csv").is_file():
        return False
    return all(metrics_path(cell, s).is_file() for s in cfg.seeds)


def final_success(root: Path, name: str, seeds: tuple[int, ...]) -> float:
    """Mean last-window success rate of a cached cell across its seeds."""
    total = 0.0
    for s in seeds:
        rows = read_metrics(metrics_path(root / name, s))
        total += rows[-1].success_rate
    return total / len(seeds)


def select_alpha(root: Path) -> float:
    """Best sweep alpha by mean success at the selection budget (ties: lowest)."""
    best, best_rate = None, -1.0
    for alpha in ALPHA_GRID:
        rate = final_success(root, alpha_cell_name(alpha), SWEEP_SEEDS)
        if rate > best_rate + 1e-12:
            best, best_rate = alpha, rate
    return best


def selected_alpha_config(root: Path) -> tuple[str, ExperimentConfig]:
    """Full-budget cell for the sweep winner; requires the sweep cache."""
    cells = cell_configs()
    for alpha in ALPHA_GRID:
        name = alpha_cell_name(alpha)
        if not is_complete(root, name, cells[name]):
            raise RuntimeError(f"alpha sweep cell {name} missing; run it first")
    alpha = select_alpha(root)
    return f"c4_selected_a{int(round(alpha * 10)):02d}", _hallway(
        mode="none", selfplay_percent=0.0, alpha=alpha
    )


def find_selected_cell(root: Path) -> Path | None:
    hits = sorted(root.glob("c4_selected_a*")) if root.is_dir() else []
    return hits[0] if hits else None


def run_cell(root: Path, name: str, cfg: ExperimentConfig, verbose: bool = False) -> None:
    cell = root / name
    if is_complete(root, name, cfg):
        print(f"[{name}] cached", flush=True)
        return
    saved = cell / "config.cfg"
    if saved.is_file() and saved.read_text(encoding="utf-8") != config_to_text(cfg):
        # stale cell from an older configuration; partial cells resume instead
        shutil.rmtree(cell)
    started = time.time()
    print(f"[{name}] running {len(cfg.seeds)} seed(s)...", flush=True)
    run_experiment(cfg, cell, verbose=verbose, resume=True)
    print(f"[{name}] done in {time.time() - started:.0f}s", flush=True)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(DEFAULT_ROOT), help="cache root directory")
    ap.add_argument("--only", default=None, help="comma-separated cell names")
    ap.add_argument("--list", action="store_true", help="list cells and status")
    ap.add_argument("--verbose", action="store_true", help="per-seed progress to stderr")
    args = ap.parse_args(argv)

    root = Path(args.out)
    cells = cell_configs()
    if args.list:
        for name, cfg in cells.items():
            state = "complete" if is_complete(root, name, cfg) else "missing"
            print(f"{name:18s} {state}")
        sel = find_selected_cell(root)
        print(f"{'c4_selected':18s} {'complete (' + sel.name + ')' if sel else 'missing'}")
        return 0

    wanted = args.only.split(",") if args.only else None
    if wanted:
        unknown = [w for w in wanted if w not in cells and w != "c4_selected"]
        if unknown:
            print(f"unknown cells: {', '.join(unknown)}", file=sys.stderr)
            return 2

    for name, cfg in cells.items():
        if wanted and name not in wanted:
            continue
        run_cell(root, name, cfg, verbose=args.verbose)

    # the full-budget winner cell runs once the sweep cache is in place
    if wanted is None or "c4_selected" in wanted:
        name, cfg = selected_alpha_config(root)
        run_cell(root, name, cfg, verbose=args.verbose)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
