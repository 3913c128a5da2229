"""Asymmetric two-mind self-play curriculum for reinforcement learning.

One mind (Alice) proposes tasks by acting and handing over; the other
(Bob) reverses or repeats them for internal reward, building an
automatic curriculum that transfers to externally rewarded tasks.
"""

from .config import ExperimentConfig, load_config, load_preset
from .engine import run_selfplay_episode, run_target_episode
from .envs import Hallway, LightKey, MountainCar, make_env
from .learn import policy_gradient_step
from .metrics import compute_speedup
from .oracle import compute_distances, estimate_alice_reward, verify_bob_fastness
from .policy import NeuralPolicy, RandomPolicy, TabularPolicy
from .runner import run_experiment

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "Hallway",
    "LightKey",
    "MountainCar",
    "NeuralPolicy",
    "RandomPolicy",
    "TabularPolicy",
    "compute_distances",
    "compute_speedup",
    "estimate_alice_reward",
    "load_config",
    "load_preset",
    "make_env",
    "policy_gradient_step",
    "run_experiment",
    "run_selfplay_episode",
    "run_target_episode",
    "verify_bob_fastness",
    "__version__",
]
