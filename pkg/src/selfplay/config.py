"""Flat key=value experiment configs with per-environment presets.

Lines are UTF-8 `key=value`; blank lines and #-comments are ignored.
Unknown keys are errors, as are env-specific keys given for the wrong
environment. Optional keys accept the literal `none`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

MODES = ("reverse", "repeat", "both", "none")
POLICIES = ("tabular", "neural")
BUDGET_UNITS = ("episodes", "env_steps")

ENV_PARAM_KEYS = {
    "hallway": {"m"},
    "lightkey": {"width", "height", "wall_col", "p_light_off", "step_cost"},
    "mountaincar": set(),
}


@dataclass
class ExperimentConfig:
    env: str = "hallway"
    mode: str = "reverse"
    policy: str = "tabular"
    lr: float = 0.1
    batch_size: int = 16
    t_max: int = 30
    t_max_selfplay: int | None = None
    t_max_target: int | None = None
    entropy_selfplay: float = 0.0
    entropy_target: float = 0.0
    gamma: float = 0.033
    selfplay_percent: float = 0.0
    seeds: tuple[int, ...] = (0,)
    budget: int = 100_000
    budget_unit: str = "episodes"
    alpha: float | None = None
    random_alice: bool = False
    alice_step_cap: int | None = None
    hidden: tuple[int, ...] = (50, 50)
    window: int = 1000
    baseline_coef: float = 0.1
    init_std: float = 0.2
    # environment parameters (validated against env)
    m: int = 25
    width: int = 6
    height: int = 6
    wall_col: int = 3
    p_light_off: float = 0.5
    step_cost: float = 0.1

    def selfplay_t_max(self) -> int:
        return self.t_max if self.t_max_selfplay is None else self.t_max_selfplay

    def target_t_max(self) -> int:
        return self.t_max if self.t_max_target is None else self.t_max_target

    def validate(self) -> None:
        if self.env not in ENV_PARAM_KEYS:
            raise ConfigError(f"unknown env {self.env!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.policy not in POLICIES:
            raise ConfigError(f"policy must be one of {POLICIES}")
        if self.budget_unit not in BUDGET_UNITS:
            raise ConfigError(f"budget_unit must be one of {BUDGET_UNITS}")
        if not 0.0 <= self.selfplay_percent <= 100.0:
            raise ConfigError("selfplay_percent must be in [0, 100]")
        if self.selfplay_percent == 100.0:
            raise ConfigError("pure self-play never consumes the target budget")
        if self.mode == "none" and self.selfplay_percent > 0:
            raise ConfigError("mode=none is incompatible with selfplay_percent > 0")
        if self.batch_size < 1 or self.t_max < 1 or self.budget < 1 or self.window < 1:
            raise ConfigError("batch_size, t_max, budget, window must be positive")
        if self.alpha is not None and self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if not self.seeds:
            raise ConfigError("need at least one seed")


class ConfigError(ValueError):
    pass


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _parse_int_tuple(s: str) -> tuple[int, ...]:
    return tuple(int(p) for p in s.split(",") if p.strip() != "")


def _optional(parser):
    def parse(s: str):
        return None if s.lower() == "none" else parser(s)

    return parse


_PARSERS = {
    "env": str,
    "mode": str.lower,
    "policy": str.lower,
    "lr": float,
    "batch_size": int,
    "t_max": int,
    "t_max_selfplay": _optional(int),
    "t_max_target": _optional(int),
    "entropy_selfplay": float,
    "entropy_target": float,
    "gamma": float,
    "selfplay_percent": float,
    "seeds": _parse_int_tuple,
    "budget": int,
    "budget_unit": str.lower,
    "alpha": _optional(float),
    "random_alice": _parse_bool,
    "alice_step_cap": _optional(int),
    "hidden": _parse_int_tuple,
    "window": int,
    "baseline_coef": float,
    "init_std": float,
    "m": int,
    "width": int,
    "height": int,
    "wall_col": int,
    "p_light_off": float,
    "step_cost": float,
}

_ALL_ENV_KEYS = set().union(*ENV_PARAM_KEYS.values())


def parse_config(text: str) -> ExperimentConfig:
    values: dict = {}
    seen_keys: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen_keys:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen_keys.add(key)
        try:
            values[key] = _PARSERS[key](val)
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"line {lineno}: bad value for {key}: {e}") from e
    cfg = ExperimentConfig(**values)
    allowed = ENV_PARAM_KEYS.get(cfg.env, set())
    for key in (seen_keys & _ALL_ENV_KEYS) - allowed:
        raise ConfigError(f"key {key!r} does not apply to env {cfg.env!r}")
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def config_to_text(cfg: ExperimentConfig) -> str:
    # emit only keys parse_config would accept back for this env
    skip = _ALL_ENV_KEYS - ENV_PARAM_KEYS.get(cfg.env, set())
    lines = []
    for f in fields(cfg):
        if f.name in skip:
            continue
        v = getattr(cfg, f.name)
        if v is None:
            s = "none"
        elif isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, tuple):
            s = ",".join(str(x) for x in v)
        elif isinstance(v, float):
            s = repr(v)
        else:
            s = str(v)
        lines.append(f"{f.name}={s}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(config_to_text(cfg), encoding="utf-8")


def with_overrides(cfg: ExperimentConfig, **kv) -> ExperimentConfig:
    out = replace(cfg, **kv)
    out.validate()
    return out


def preset_path(name: str) -> Path:
    p = Path(str(resources.files("selfplay") / "presets" / f"{name}.cfg"))
    if not p.is_file():
        raise ConfigError(f"no preset named {name!r}")
    return p


def load_preset(name: str) -> ExperimentConfig:
    return load_config(preset_path(name))


def build_env(cfg: ExperimentConfig):
    from .envs import Hallway, LightKey, MountainCar

    if cfg.env == "hallway":
        return Hallway(m=cfg.m, target_t_max=cfg.target_t_max())
    if cfg.env == "lightkey":
        return LightKey(
            width=cfg.width,
            height=cfg.height,
            wall_col=cfg.wall_col,
            p_light_off=cfg.p_light_off,
            step_cost=cfg.step_cost,
        )
    if cfg.env == "mountaincar":
        return MountainCar()
    raise ConfigError(f"unknown env {cfg.env!r}")


def build_policies(cfg: ExperimentConfig, env, rng):
    """(alice, bob) per config; alice may be the fixed random mover.

    Bob is always built first so his initialization draws do not depend
    on what kind of Alice he is paired with.
    """
    from .policy import NeuralPolicy, RandomPolicy, TabularPolicy

    if cfg.policy == "tabular":
        bob = TabularPolicy(env)
    else:
        bob = NeuralPolicy(env, rng, hidden=cfg.hidden, init_std=cfg.init_std)
    if cfg.random_alice:
        alice = RandomPolicy(env)
    elif cfg.policy == "tabular":
        alice = TabularPolicy(env)
    else:
        alice = NeuralPolicy(env, rng, hidden=cfg.hidden, init_std=cfg.init_std)
    return alice, bob
