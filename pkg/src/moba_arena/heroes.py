"""Hero catalog: specs loaded and validated from one YAML file per hero.

Fractional attributes (lifesteal, crit chance, resilience, cooldown
reduction, attack speed) are stored milli-scaled so the engine stays in
integer arithmetic.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources

import yaml

HERO_TYPES = ("Tank", "Warrior", "Assassin", "Mage", "Marksman", "Support")
DAMAGE_TYPES = ("physical", "magical", "true")
SKILL_SHAPES = ("bolt", "circle", "buff")
CONTROL_KINDS = ("stun", "slow")

CATALOG_SIZE = 20

# Attribute name -> True when the value is a milli-scaled fraction/rate.
ATTRIBUTES = {
    "max_hp": False,
    "max_mp": False,
    "physical_attack": False,
    "magical_attack": False,
    "physical_defense": False,
    "magical_defense": False,
    "physical_penetration": False,
    "magical_penetration": False,
    "physical_lifesteal": True,
    "magical_lifesteal": True,
    "hp_regen": False,
    "mp_regen": False,
    "attack_speed": True,
    "cooldown_reduction": True,
    "crit_chance": True,
    "resilience": True,
    "attack_range": False,
    "move_speed": False,
}

# Heroes whose family populates a sub-range of the private observation block.
PRIVATE_FAMILIES = {"diaochan": 11, "luna": 7, "jvyoujing": 9, "luban": 5}


class CatalogError(ValueError):
    """Malformed hero data file or inconsistent catalog."""


@dataclass(frozen=True)
class ControlEffect:
    kind: str            # stun | slow
    duration_s: float
    strength_milli: int = 0   # slow: move-speed reduction fraction


@dataclass(frozen=True)
class BuffEffect:
    duration_s: float
    deltas: dict[str, int] = field(default_factory=dict)
    heal: int = 0        # instant hp restore, points


@dataclass(frozen=True)
class SkillSpec:
    name: str
    damage_type: str
    shape: str
    base_damage: int
    per_level_damage: int
    mp_cost: int
    cooldown_s: float
    range: int
    control: ControlEffect | None = None
    buff: BuffEffect | None = None

    def damage_at(self, skill_level: int) -> int:
        return self.base_damage + self.per_level_damage * (skill_level - 1)


@dataclass(frozen=True)
class ItemSpec:
    name: str
    cost: int
    deltas: dict[str, int] = field(default_factory=dict)
    # Active items grant the Equipment Skill button.
    active_heal: int = 0
    active_cooldown_s: float = 0.0

    @property
    def is_active(self) -> bool:
        return self.active_heal > 0


@dataclass(frozen=True)
class HeroSpec:
    hero_id: str
    name: str
    hero_type: str
    base: dict[str, int]
    growth: dict[str, int]
    skills: tuple[SkillSpec, ...]
    has_skill4: bool
    items: tuple[ItemSpec, ...]

    def attr(self, name: str, level: int) -> int:
        return self.base[name] + self.growth[name] * (level - 1)

    @property
    def family(self) -> str | None:
        return self.hero_id if self.hero_id in PRIVATE_FAMILIES else None


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise CatalogError(f"{path}: {message}")


def _parse_control(raw, path: str) -> ControlEffect | None:
    if raw is None:
        return None
    kind = raw.get("kind")
    _require(kind in CONTROL_KINDS, path, f"bad control kind {kind!r}")
    duration = float(raw.get("duration", 0.0))
    _require(duration > 0, path, "control duration must be positive")
    return ControlEffect(kind=kind, duration_s=duration, strength_milli=int(raw.get("strength", 0)))


def _parse_buff(raw, path: str) -> BuffEffect | None:
    if raw is None:
        return None
    duration = float(raw.get("duration", 0.0))
    heal = int(raw.get("heal", 0))
    deltas = {str(k): int(v) for k, v in (raw.get("deltas") or {}).items()}
    for key in deltas:
        _require(key in ATTRIBUTES, path, f"buff delta for unknown attribute {key!r}")
    _require(duration > 0 or heal > 0, path, "buff must heal or last some duration")
    return BuffEffect(duration_s=duration, deltas=deltas, heal=heal)


def _parse_skill(raw, path: str) -> SkillSpec:
    for key in ("name", "damage_type", "shape", "base_damage", "per_level_damage",
                "mp_cost", "cooldown", "range"):
        _require(key in raw, path, f"skill missing key {key!r}")
    _require(raw["damage_type"] in DAMAGE_TYPES, path, f"bad damage_type {raw['damage_type']!r}")
    _require(raw["shape"] in SKILL_SHAPES, path, f"bad shape {raw['shape']!r}")
    skill = SkillSpec(
        name=str(raw["name"]),
        damage_type=str(raw["damage_type"]),
        shape=str(raw["shape"]),
        base_damage=int(raw["base_damage"]),
        per_level_damage=int(raw["per_level_damage"]),
        mp_cost=int(raw["mp_cost"]),
        cooldown_s=float(raw["cooldown"]),
        range=int(raw["range"]),
        control=_parse_control(raw.get("control"), path),
        buff=_parse_buff(raw.get("buff"), path),
    )
    _require(skill.base_damage >= 0 and skill.per_level_damage >= 0, path, "negative skill damage")
    _require(skill.mp_cost >= 0 and skill.cooldown_s >= 0, path, "negative skill cost/cooldown")
    _require(skill.range > 0, path, "skill range must be positive")
    return skill


def _parse_item(raw, path: str) -> ItemSpec:
    _require("name" in raw and "cost" in raw, path, "item missing name/cost")
    deltas = {str(k): int(v) for k, v in (raw.get("deltas") or {}).items()}
    for key in deltas:
        _require(key in ATTRIBUTES, path, f"item delta for unknown attribute {key!r}")
    return ItemSpec(
        name=str(raw["name"]),
        cost=int(raw["cost"]),
        deltas=deltas,
        active_heal=int(raw.get("active_heal", 0)),
        active_cooldown_s=float(raw.get("active_cooldown", 0.0)),
    )


def parse_hero_spec(payload: dict, path: str) -> HeroSpec:
    for key in ("hero_id", "name", "hero_type", "attributes", "skills", "items"):
        _require(key in payload, path, f"missing top-level key {key!r}")
    _require(payload["hero_type"] in HERO_TYPES, path, f"bad hero_type {payload['hero_type']!r}")

    base: dict[str, int] = {}
    growth: dict[str, int] = {}
    attrs = payload["attributes"]
    for name in ATTRIBUTES:
        _require(name in attrs, path, f"missing attribute {name!r}")
        pair = attrs[name]
        _require(isinstance(pair, list) and len(pair) == 2, path, f"attribute {name!r} must be [base, growth]")
        base[name] = int(pair[0])
        growth[name] = int(pair[1])
        _require(base[name] >= 0, path, f"attribute {name!r} must be >= 0")
    _require(base["attack_range"] > 0, path, "attack_range must be positive")
    _require(base["move_speed"] > 0, path, "move_speed must be positive")

    skills = tuple(_parse_skill(s, path) for s in payload["skills"])
    has_skill4 = bool(payload.get("skill4", False))
    expected = 4 if has_skill4 else 3
    _require(len(skills) == expected, path,
             f"expected {expected} skills (skill4={has_skill4}), got {len(skills)}")

    items = tuple(_parse_item(i, path) for i in payload["items"])
    costs = [i.cost for i in items]
    _require(costs == sorted(costs), path, "item purchase script must be cost-ordered")
    _require(len(items) <= 6, path, "at most six items")

    return HeroSpec(
        hero_id=str(payload["hero_id"]),
        name=str(payload["name"]),
        hero_type=str(payload["hero_type"]),
        base=base,
        growth=growth,
        skills=skills,
        has_skill4=has_skill4,
        items=items,
    )


def _load_hero_file(res) -> HeroSpec:
    try:
        payload = yaml.safe_load(res.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise CatalogError(f"{res.name}: YAML parse error: {exc}") from exc
    if not isinstance(payload, dict):
        raise CatalogError(f"{res.name}: hero file must contain a mapping")
    return parse_hero_spec(payload, res.name)


@functools.lru_cache(maxsize=1)
def hero_catalog() -> tuple[HeroSpec, ...]:
    """Load all hero data files; exactly 20 heroes covering all six types."""
    root = resources.files("moba_arena").joinpath("data/heroes")
    specs = []
    for res in sorted(root.iterdir(), key=lambda r: r.name):
        if res.name.endswith(".yaml"):
            specs.append(_load_hero_file(res))
    ids = [s.hero_id for s in specs]
    if len(set(ids)) != len(ids):
        raise CatalogError("duplicate hero_id in catalog")
    if len(specs) != CATALOG_SIZE:
        raise CatalogError(f"catalog must contain exactly {CATALOG_SIZE} heroes, found {len(specs)}")
    missing = set(HERO_TYPES) - {s.hero_type for s in specs}
    if missing:
        raise CatalogError(f"catalog missing hero types: {sorted(missing)}")
    return tuple(specs)


def hero_ids() -> list[str]:
    return [spec.hero_id for spec in hero_catalog()]


def get_hero(hero_id: str) -> HeroSpec:
    for spec in hero_catalog():
        if spec.hero_id == hero_id:
            return spec
    from moba_arena.config import ConfigurationError

    raise ConfigurationError(f"unknown hero_id: {hero_id!r}")
