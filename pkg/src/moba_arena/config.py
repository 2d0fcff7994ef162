"""Engine constants, reward weights, and match configuration.

Every tunable lives here (or in the data files) and can be overridden from a
YAML config file, so experiments never require code edits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Any

import yaml


class ConfigurationError(ValueError):
    """Raised when a match or engine configuration is invalid."""


@dataclass(frozen=True)
class EngineConfig:
    ticks_per_second: int = 30
    decision_interval: int = 4        # ticks per agent action (~133 ms)
    time_limit_s: int = 1200

    # Map geometry, map units (x: length, z: width); lane runs along x.
    map_length: int = 30000
    map_width: int = 6000
    lane_z: int = 3000
    crystal_x: int = 2000
    turret_x: int = 8000
    hero_spawn_x: int = 3500
    creep_spawn_x: int = 4200

    # Combat.
    mitigation_constant: int = 600    # K in raw * K / (K + defense)
    crit_multiplier_milli: int = 2000
    max_control_duration_s: float = 3.0

    # Structures.
    turret_hp: int = 4000
    turret_attack: int = 260
    turret_range: int = 2800
    turret_sight: int = 3200
    turret_defense: int = 40
    crystal_hp: int = 3500
    crystal_attack: int = 320
    crystal_range: int = 2300
    crystal_sight: int = 3000
    crystal_defense: int = 50
    structure_attack_period_s: float = 1.0

    # Creeps.
    creep_wave_period_s: int = 30
    first_wave_s: int = 10
    creeps_per_wave: int = 3
    creep_hp: int = 1200
    creep_attack: int = 60
    creep_defense: int = 20
    creep_range: int = 350
    creep_sight: int = 1400
    creep_move_speed: int = 550
    creep_attack_period_s: float = 1.0
    creep_spacing: int = 200

    # Economy and progression.
    passive_gold_per_s: int = 1
    passive_exp_per_s: int = 1
    lasthit_gold: int = 60
    lasthit_exp: int = 80
    kill_gold: int = 200
    kill_exp: int = 150
    level_cap: int = 15
    exp_curve: int = 100              # level requires exp >= exp_curve * level^2

    # Hero mechanics shared by all heroes.
    respawn_base_s: int = 10          # + respawn_per_level_s * hero level
    respawn_per_level_s: int = 4
    recall_channel_s: int = 6
    heal_fraction_milli: int = 150
    heal_cooldown_s: int = 120
    summoner_dash_range: int = 1500
    summoner_cooldown_s: int = 60

    @property
    def tick_duration(self) -> float:
        return 1.0 / self.ticks_per_second

    def seconds_to_ticks(self, seconds: float) -> int:
        return max(0, round(seconds * self.ticks_per_second))


# Appendix-style default weights; kill's negative sign is transcribed as-is.
@dataclass(frozen=True)
class RewardWeights:
    hp_point: float = 2.0
    tower_hp_point: float = 10.0
    money: float = 0.006
    ep_rate: float = 0.75
    death: float = -1.0
    kill: float = -0.6
    exp: float = 0.006
    win: float = 1.0
    lose: float = -1.0
    no_op: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class MatchConfig:
    camp0_hero: str = "diaochan"
    camp1_hero: str = "diaochan"
    seed: int = 0
    time_limit_s: int | None = None   # None -> EngineConfig default
    engine: EngineConfig = field(default_factory=EngineConfig)
    rewards: RewardWeights = field(default_factory=RewardWeights)

    def __post_init__(self) -> None:
        limit = self.time_limit_s if self.time_limit_s is not None else self.engine.time_limit_s
        if limit <= 0:
            raise ConfigurationError(f"time limit must be positive, got {limit}")
        if self.engine.ticks_per_second <= 0 or self.engine.decision_interval <= 0:
            raise ConfigurationError("tick rate and decision interval must be positive")

    @property
    def effective_time_limit_s(self) -> int:
        return self.time_limit_s if self.time_limit_s is not None else self.engine.time_limit_s

    def hero_for_camp(self, camp: int) -> str:
        return self.camp0_hero if camp == 0 else self.camp1_hero


def _override_dataclass(instance, overrides: dict[str, Any]):
    known = {f.name for f in fields(instance)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return replace(instance, **overrides)


def load_config_file(path: str) -> tuple[EngineConfig, RewardWeights]:
    """Load {engine: {...}, rewards: {...}} overrides from a YAML file."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = yaml.safe_load(handle) or {}
    if not isinstance(payload, dict):
        raise ConfigurationError(f"config root must be a mapping: {path}")
    engine = _override_dataclass(EngineConfig(), payload.get("engine", {}) or {})
    rewards = _override_dataclass(RewardWeights(), payload.get("rewards", {}) or {})
    return engine, rewards
