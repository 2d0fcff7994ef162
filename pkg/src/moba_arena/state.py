"""Authoritative match state: heroes, creeps, structures, clocks, RNG.

Mutable simulation state lives here; the transition rules live in engine.py.
Every field that transitions is an int (milli-scaled where fractional), which
makes digests bitwise-stable across platforms.

Coordinate/positions are in milli-map-units; hp/mp in millipoints; timers in
ticks.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from moba_arena.config import MatchConfig
from moba_arena.fixedmath import MILLI
from moba_arena.heroes import HeroSpec, get_hero
from moba_arena.rng import SplitMix64

# Persistent hero commands, decoded from the last decision's button.
CMD_IDLE = 0
CMD_MOVE = 1
CMD_ATTACK = 2

OUTCOME_NONE = "none"
OUTCOME_CAMP0 = "camp0-win"
OUTCOME_CAMP1 = "camp1-win"
OUTCOME_DRAW = "draw"

REASON_CRYSTAL = "crystal destroyed"
REASON_TIME = "time limit"


@dataclass(frozen=True)
class MatchOutcome:
    winner: str               # camp0 | camp1 | draw
    end_frame: int
    reason: str               # crystal destroyed | time limit


@dataclass
class DamageRecord:
    attacker: str
    target: str
    amount_milli: int
    damage_type: str
    crit: bool = False


@dataclass
class EventLog:
    """Events of one decision interval."""

    kills: list[tuple[str, str]] = field(default_factory=list)        # (killer, victim-hero)
    last_hits: list[tuple[str, str]] = field(default_factory=list)    # (hero, creep)
    damage: list[DamageRecord] = field(default_factory=list)
    structure_kills: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def clear(self) -> None:
        self.kills.clear()
        self.last_hits.clear()
        self.damage.clear()
        self.structure_kills.clear()
        self.warnings.clear()


class Buff:
    __slots__ = ("ticks_left", "deltas")

    def __init__(self, ticks_left: int, deltas: dict[str, int]):
        self.ticks_left = ticks_left
        self.deltas = deltas


class HeroState:
    __slots__ = (
        "spec", "camp", "uid", "x", "z", "hp", "mp", "level", "exp", "gold",
        "total_gold", "skill_cd", "heal_cd", "summoner_cd", "equip_cd",
        "recall_left", "stun_left", "slow_left", "slow_milli", "alive",
        "respawn_left", "kills", "deaths", "assists", "hero_damage_milli",
        "buff_marks", "buffs", "items_bought", "attack_cd", "command",
        "move_dir", "target_uid", "eff", "last_button",
    )

    def __init__(self, spec: HeroSpec, camp: int, x: int, z: int):
        self.spec = spec
        self.camp = camp
        self.uid = f"hero{camp}"
        self.x = x
        self.z = z
        self.level = 1
        self.exp = 0
        self.gold = 0
        self.total_gold = 0
        self.skill_cd = [0, 0, 0, 0]
        self.heal_cd = 0
        self.summoner_cd = 0
        self.equip_cd = 0
        self.recall_left = 0
        self.stun_left = 0
        self.slow_left = 0
        self.slow_milli = 0
        self.alive = True
        self.respawn_left = 0
        self.kills = 0
        self.deaths = 0
        self.assists = 0
        self.hero_damage_milli = 0
        self.buff_marks = 0
        self.buffs: list[Buff] = []
        self.items_bought = 0
        self.attack_cd = 0
        self.command = CMD_IDLE
        self.move_dir = 0
        self.target_uid = ""
        self.last_button = 0
        self.eff: dict[str, int] = {}
        self.recompute_effective()
        self.hp = self.eff["max_hp"] * MILLI
        self.mp = self.eff["max_mp"] * MILLI

    def recompute_effective(self) -> None:
        eff = {name: self.spec.attr(name, self.level) for name in self.spec.base}
        for idx in range(self.items_bought):
            for key, delta in self.spec.items[idx].deltas.items():
                eff[key] += delta
        for buff in self.buffs:
            for key, delta in buff.deltas.items():
                eff[key] += delta
        self.eff = eff

    @property
    def max_hp_milli(self) -> int:
        return self.eff["max_hp"] * MILLI

    @property
    def max_mp_milli(self) -> int:
        return self.eff["max_mp"] * MILLI

    def skill_count(self) -> int:
        return len(self.spec.skills)

    def skill_level(self) -> int:
        # Skill levels track hero level automatically (no manual upgrades).
        return 1 + (self.level - 1) // 3

    def has_active_item(self) -> bool:
        return any(self.spec.items[i].is_active for i in range(self.items_bought))

    def active_item(self):
        for i in range(self.items_bought):
            if self.spec.items[i].is_active:
                return self.spec.items[i]
        return None

    def state_tuple(self) -> tuple:
        return (
            self.spec.hero_id, self.camp, self.x, self.z, self.hp, self.mp,
            self.level, self.exp, self.gold, self.total_gold,
            tuple(self.skill_cd), self.heal_cd, self.summoner_cd, self.equip_cd,
            self.recall_left, self.stun_left, self.slow_left, self.slow_milli,
            self.alive, self.respawn_left, self.kills, self.deaths, self.assists,
            self.hero_damage_milli, self.buff_marks,
            tuple((b.ticks_left, tuple(sorted(b.deltas.items()))) for b in self.buffs),
            self.items_bought, self.attack_cd, self.command, self.move_dir,
            self.target_uid, self.last_button,
        )


class Creep:
    __slots__ = ("camp", "uid", "wave", "slot", "x", "z", "hp", "max_hp_milli",
                 "attack", "defense", "attack_range", "sight", "alive", "attack_cd")

    def __init__(self, camp: int, wave: int, slot: int, x: int, z: int, cfg):
        self.camp = camp
        self.wave = wave
        self.slot = slot
        self.uid = f"creep{camp}-{wave}-{slot}"
        self.x = x
        self.z = z
        self.max_hp_milli = cfg.creep_hp * MILLI
        self.hp = self.max_hp_milli
        self.attack = cfg.creep_attack
        self.defense = cfg.creep_defense
        self.attack_range = cfg.creep_range * MILLI
        self.sight = cfg.creep_sight * MILLI
        self.alive = True
        self.attack_cd = 0

    def lane_progress_milli(self, map_length_milli: int) -> int:
        # Fraction of lane traveled toward the enemy base, milli-scaled.
        if self.camp == 0:
            return self.x * 1000 // map_length_milli
        return (map_length_milli - self.x) * 1000 // map_length_milli

    def state_tuple(self) -> tuple:
        return (self.uid, self.camp, self.x, self.z, self.hp, self.alive, self.attack_cd)


class Structure:
    __slots__ = ("camp", "kind", "uid", "x", "z", "hp", "max_hp_milli", "attack",
                 "defense", "attack_range", "sight", "alive", "attack_cd")

    def __init__(self, camp: int, kind: str, x: int, z: int, hp: int, attack: int,
                 defense: int, attack_range: int, sight: int):
        self.camp = camp
        self.kind = kind              # turret | crystal
        self.uid = f"{kind}{camp}"
        self.x = x
        self.z = z
        self.max_hp_milli = hp * MILLI
        self.hp = self.max_hp_milli
        self.attack = attack
        self.defense = defense
        self.attack_range = attack_range * MILLI
        self.sight = sight * MILLI
        self.alive = True
        self.attack_cd = 0

    def state_tuple(self) -> tuple:
        return (self.uid, self.hp, self.alive, self.attack_cd)


class GameState:
    """Full authoritative match state. Single-threaded by contract."""

    def __init__(self, config: MatchConfig):
        cfg = config.engine
        self.config = config
        self.frame_no = 0
        self.tick_duration_milli = MILLI // cfg.ticks_per_second
        self.decision_interval = cfg.decision_interval
        self.time_limit_ticks = config.effective_time_limit_s * cfg.ticks_per_second
        self.game_id = f"m{config.seed:x}-{config.camp0_hero}-{config.camp1_hero}"
        self.outcome: MatchOutcome | None = None

        length_m = cfg.map_length * MILLI
        lane_z = cfg.lane_z * MILLI
        self.heroes = [
            HeroState(get_hero(config.camp0_hero), 0, cfg.hero_spawn_x * MILLI, lane_z),
            HeroState(get_hero(config.camp1_hero), 1, length_m - cfg.hero_spawn_x * MILLI, lane_z),
        ]
        self.turrets = [
            Structure(0, "turret", cfg.turret_x * MILLI, lane_z, cfg.turret_hp,
                      cfg.turret_attack, cfg.turret_defense, cfg.turret_range, cfg.turret_sight),
            Structure(1, "turret", length_m - cfg.turret_x * MILLI, lane_z, cfg.turret_hp,
                      cfg.turret_attack, cfg.turret_defense, cfg.turret_range, cfg.turret_sight),
        ]
        self.crystals = [
            Structure(0, "crystal", cfg.crystal_x * MILLI, lane_z, cfg.crystal_hp,
                      cfg.crystal_attack, cfg.crystal_defense, cfg.crystal_range, cfg.crystal_sight),
            Structure(1, "crystal", length_m - cfg.crystal_x * MILLI, lane_z, cfg.crystal_hp,
                      cfg.crystal_attack, cfg.crystal_defense, cfg.crystal_range, cfg.crystal_sight),
        ]
        self.creeps: list[Creep] = []
        self.next_wave_tick = cfg.first_wave_s * cfg.ticks_per_second
        self.wave_counter = 0

        # Both camps draw from identically-seeded streams: mirrored matches
        # then see mirrored rolls, which the symmetry invariant requires.
        base = SplitMix64(config.seed)
        camp_seed = base.next_u64()
        self.rng = [SplitMix64(camp_seed), SplitMix64(camp_seed)]

        self.events = EventLog()

    # -- clocks ---------------------------------------------------------

    @property
    def match_clock_ticks(self) -> int:
        return self.frame_no

    def clock_seconds(self) -> float:
        return self.frame_no / self.config.engine.ticks_per_second

    # -- unit lookups ---------------------------------------------------

    def hero(self, camp: int) -> HeroState:
        return self.heroes[camp]

    def enemy_hero(self, camp: int) -> HeroState:
        return self.heroes[1 - camp]

    def alive_creeps(self, camp: int) -> list[Creep]:
        return [c for c in self.creeps if c.alive and c.camp == camp]

    def unit_by_uid(self, uid: str):
        if uid.startswith("hero"):
            return self.heroes[int(uid[4])]
        if uid.startswith("turret"):
            return self.turrets[int(uid[6])]
        if uid.startswith("crystal"):
            return self.crystals[int(uid[7])]
        for creep in self.creeps:
            if creep.uid == uid:
                return creep
        return None

    # -- digest / serialization -----------------------------------------

    def state_tuple(self) -> tuple:
        return (
            self.frame_no,
            self.outcome.winner if self.outcome else OUTCOME_NONE,
            tuple(h.state_tuple() for h in self.heroes),
            tuple(t.state_tuple() for t in self.turrets),
            tuple(c.state_tuple() for c in self.crystals),
            tuple(c.state_tuple() for c in self.creeps if c.alive),
            self.next_wave_tick,
            self.wave_counter,
            (self.rng[0].state, self.rng[1].state),
        )

    def digest(self) -> str:
        return hashlib.sha256(repr(self.state_tuple()).encode()).hexdigest()

    def serialize(self) -> str:
        """Compact JSON blob of the full state (the raw_state payload)."""
        payload = {
            "game_id": self.game_id,
            "frame_no": self.frame_no,
            "outcome": self.outcome.winner if self.outcome else OUTCOME_NONE,
            "heroes": [list(h.state_tuple()) for h in self.heroes],
            "turrets": [list(t.state_tuple()) for t in self.turrets],
            "crystals": [list(c.state_tuple()) for c in self.crystals],
            "creeps": [list(c.state_tuple()) for c in self.creeps if c.alive],
            "next_wave_tick": self.next_wave_tick,
            "wave_counter": self.wave_counter,
            "rng": [self.rng[0].state, self.rng[1].state],
        }
        return json.dumps(payload, separators=(",", ":"), default=_json_default)


def _json_default(value):
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"not JSON-serializable: {type(value)}")
