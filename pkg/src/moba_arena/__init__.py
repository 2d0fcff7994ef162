"""Deterministic MOBA 1v1 arena: engine, RL env protocol, self-play training, evaluation."""

from moba_arena.engine import advance, new_match, resolve_damage, terminal
from moba_arena.heroes import hero_catalog
from moba_arena.env import Arena1v1Env

__version__ = "0.1.0"

__all__ = [
    "Arena1v1Env",
    "advance",
    "hero_catalog",
    "new_match",
    "resolve_damage",
    "terminal",
    "__version__",
]
