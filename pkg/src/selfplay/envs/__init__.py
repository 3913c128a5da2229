"""Built-in environments and the registry used by experiment configs."""

from __future__ import annotations

from .base import Environment
from .hallway import Hallway
from .lightkey import LightKey
from .mountaincar import MountainCar

__all__ = ["Environment", "Hallway", "LightKey", "MountainCar", "make_env"]


def make_env(name: str, **kwargs) -> Environment:
    if name == "hallway":
        return Hallway(**kwargs)
    if name == "lightkey":
        return LightKey(**kwargs)
    if name == "mountaincar":
        return MountainCar(**kwargs)
    raise ValueError(f"unknown environment {name!r}")
