"""Observation encoding: a fixed 385-wide vector per camp.

Component layout (widths): hero public status 49 x 2, hero skills 53 x 2,
hero-family private block 32, creeps 4 x (12 + 6) = 72, structures
4 x (12 + 6) = 72, match-period one-hot 5.

Every position is expressed in the ego camp's frame (lane-forward toward the
enemy base = +x), so one policy sees the same geometry from either camp.
Enemy features are always populated; a visibility flag marks what the ego
camp could actually see.
"""

from __future__ import annotations

import numpy as np

from moba_arena.fixedmath import MILLI, dist, dist_sq
from moba_arena.heroes import HERO_TYPES, PRIVATE_FAMILIES, hero_ids
from moba_arena.masks import nearest_enemy_creeps
from moba_arena.state import GameState, HeroState

HERO_PUBLIC_WIDTH = 49
HERO_SKILL_WIDTH = 53
PRIVATE_WIDTH = 32
CREEP_SLOTS = 4
CREEP_STATUS_WIDTH = 12
CREEP_POSITION_WIDTH = 6
STRUCT_SLOTS = 4
STRUCT_STATUS_WIDTH = 12
STRUCT_POSITION_WIDTH = 6
PERIOD_WIDTH = 5

COMPONENT_WIDTHS = (
    HERO_PUBLIC_WIDTH * 2,
    HERO_SKILL_WIDTH * 2,
    PRIVATE_WIDTH,
    CREEP_SLOTS * (CREEP_STATUS_WIDTH + CREEP_POSITION_WIDTH),
    STRUCT_SLOTS * (STRUCT_STATUS_WIDTH + STRUCT_POSITION_WIDTH),
    PERIOD_WIDTH,
)
TOTAL_WIDTH = sum(COMPONENT_WIDTHS)        # 385

COMPONENT_NAMES = ("hero_public", "hero_skills", "hero_private",
                   "vec_creeps", "vec_turrets", "camps_whole_info")

# Offsets of the four hero families inside the 32-wide private block.
_PRIVATE_OFFSETS = {}
_off = 0
for _fam in ("diaochan", "luna", "jvyoujing", "luban"):
    _PRIVATE_OFFSETS[_fam] = (_off, _off + PRIVATE_FAMILIES[_fam])
    _off += PRIVATE_FAMILIES[_fam]
assert _off == PRIVATE_WIDTH

# Match periods for the one-hot block, minutes.
PERIOD_BOUNDS_MIN = (2.0, 4.0, 6.0, 8.0)

HERO_SIGHT = 3500 * MILLI


def component_slices() -> dict[str, slice]:
    slices = {}
    offset = 0
    for name, width in zip(COMPONENT_NAMES, COMPONENT_WIDTHS):
        slices[name] = slice(offset, offset + width)
        offset += width
    return slices


def _frac(num: int, den: int) -> float:
    return num / den if den > 0 else 0.0


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


def _ego_x(state: GameState, camp: int, x: int) -> int:
    if camp == 0:
        return x
    return state.config.engine.map_length * MILLI - x


def _visible_to(state: GameState, camp: int, x: int, z: int) -> float:
    """1.0 when any ego-camp unit or structure has the point in sight."""
    ego = state.hero(camp)
    if ego.alive and dist_sq(ego.x, ego.z, x, z) <= HERO_SIGHT * HERO_SIGHT:
        return 1.0
    for structure in (state.turrets[camp], state.crystals[camp]):
        if structure.alive and dist_sq(structure.x, structure.z, x, z) <= structure.sight ** 2:
            return 1.0
    for creep in state.creeps:
        if creep.alive and creep.camp == camp \
                and dist_sq(creep.x, creep.z, x, z) <= creep.sight * creep.sight:
            return 1.0
    return 0.0


def _hero_public(state: GameState, camp: int, hero: HeroState, out: list) -> None:
    cfg = state.config.engine
    length = cfg.map_length * MILLI
    width = cfg.map_width * MILLI
    tps = cfg.ticks_per_second
    eff = hero.eff
    ego = camp == hero.camp

    out.append(1.0 if hero.alive else 0.0)
    out.append(_clamp01(_frac(hero.hp, hero.max_hp_milli)))
    out.append(_clamp01(_frac(hero.mp, hero.max_mp_milli)))
    out.append(hero.level / cfg.level_cap)
    out.append(min(1.0, hero.exp / (cfg.exp_curve * cfg.level_cap ** 2)))
    out.append(_ego_x(state, camp, hero.x) / length)
    out.append(hero.z / width)
    out.append(eff["move_speed"] / 2000.0)
    out.append(eff["attack_range"] / 10000.0)
    out.append(eff["physical_attack"] / 1000.0)
    out.append(eff["magical_attack"] / 1000.0)
    out.append(eff["physical_defense"] / 1000.0)
    out.append(eff["magical_defense"] / 1000.0)
    out.append(eff["physical_penetration"] / 500.0)
    out.append(eff["magical_penetration"] / 500.0)
    out.append(eff["physical_lifesteal"] / 1000.0)
    out.append(eff["magical_lifesteal"] / 1000.0)
    out.append(eff["hp_regen"] / 100.0)
    out.append(eff["mp_regen"] / 100.0)
    out.append(eff["attack_speed"] / 3000.0)
    out.append(eff["cooldown_reduction"] / 1000.0)
    out.append(eff["crit_chance"] / 1000.0)
    out.append(eff["resilience"] / 1000.0)
    out.append(min(1.0, hero.gold / 10000.0))
    out.append(min(1.0, hero.total_gold / 20000.0))
    out.append(min(1.0, hero.kills / 10.0))
    out.append(min(1.0, hero.deaths / 10.0))
    out.append(min(1.0, hero.assists / 10.0))
    out.append(min(1.0, hero.hero_damage_milli / (20000.0 * MILLI)))
    out.append(_clamp01(hero.stun_left / (3.0 * tps)))
    out.append(_clamp01(hero.slow_left / (3.0 * tps)))
    out.append(hero.slow_milli / 1000.0)
    out.append(_clamp01(hero.recall_left / (cfg.recall_channel_s * tps)))
    out.append(_clamp01(hero.respawn_left / (25.0 * tps)))
    out.append(_clamp01(hero.heal_cd / (cfg.heal_cooldown_s * tps)))
    out.append(_clamp01(hero.summoner_cd / (cfg.summoner_cooldown_s * tps)))
    out.append(_clamp01(hero.equip_cd / (120.0 * tps)))
    out.append(_clamp01(hero.attack_cd / (2.0 * tps)))
    out.append(1.0 if ego else _visible_to(state, camp, hero.x, hero.z))
    enemy_turret = state.turrets[1 - hero.camp]
    in_danger = enemy_turret.alive and \
        dist_sq(hero.x, hero.z, enemy_turret.x, enemy_turret.z) <= enemy_turret.attack_range ** 2
    out.append(1.0 if in_danger else 0.0)
    for hero_type in HERO_TYPES:
        out.append(1.0 if hero.spec.hero_type == hero_type else 0.0)
    out.append(hero_ids().index(hero.spec.hero_id) / 19.0)
    other = state.enemy_hero(hero.camp)
    out.append(min(1.0, dist(hero.x, hero.z, other.x, other.z) / length))
    enemy_crystal = state.crystals[1 - hero.camp]
    out.append(min(1.0, dist(hero.x, hero.z, enemy_crystal.x, enemy_crystal.z) / length))


def _hero_skills(state: GameState, hero: HeroState, out: list) -> None:
    cfg = state.config.engine
    tps = cfg.ticks_per_second
    level = hero.skill_level()
    for slot in range(4):
        if slot >= hero.skill_count():
            out.extend([0.0] * 13)
            continue
        skill = hero.spec.skills[slot]
        total_cd = max(1, cfg.seconds_to_ticks(skill.cooldown_s))
        out.append(1.0)
        out.append(level / 5.0)
        out.append(_clamp01(hero.skill_cd[slot] / total_cd))
        out.append(min(1.0, hero.skill_cd[slot] / (60.0 * tps)))
        out.append(min(1.0, skill.mp_cost / 300.0))
        out.append(min(1.0, skill.range / 10000.0))
        out.append(min(1.0, skill.damage_at(level) / 2000.0))
        out.append(1.0 if skill.damage_type == "physical" else 0.0)
        out.append(1.0 if skill.damage_type == "magical" else 0.0)
        out.append(1.0 if skill.damage_type == "true" else 0.0)
        out.append(1.0 if skill.shape == "bolt" else 0.0)
        out.append(1.0 if skill.shape == "circle" else 0.0)
        out.append(1.0 if skill.shape == "buff" else 0.0)
    out.append(hero.buff_marks / 9.0)


def _hero_private(state: GameState, camp: int, out: list) -> None:
    cfg = state.config.engine
    tps = cfg.ticks_per_second
    hero = state.hero(camp)
    block = [0.0] * PRIVATE_WIDTH
    family = hero.spec.family
    if family is not None:
        lo, hi = _PRIVATE_OFFSETS[family]
        feats = _family_features(state, hero, tps)
        assert len(feats) == hi - lo
        block[lo:hi] = feats
    out.extend(block)


def _family_features(state: GameState, hero: HeroState, tps: int) -> list[float]:
    cfg = state.config.engine
    cd = [_clamp01(hero.skill_cd[i] / max(1, cfg.seconds_to_ticks(hero.spec.skills[i].cooldown_s)))
          if i < hero.skill_count() else 0.0 for i in range(4)]
    marks = hero.buff_marks / 9.0
    has_buff = 1.0 if hero.buffs else 0.0
    atk_cd = _clamp01(hero.attack_cd / (2.0 * tps))
    if hero.spec.family == "diaochan":
        length = cfg.map_length * MILLI
        width = cfg.map_width * MILLI
        return [cd[0], cd[1], cd[2], marks,
                _clamp01(_frac(hero.hp, hero.max_hp_milli)),
                _clamp01(_frac(hero.mp, hero.max_mp_milli)),
                _clamp01(hero.stun_left / (3.0 * tps)),
                _clamp01(hero.slow_left / (3.0 * tps)),
                has_buff,
                _ego_x(state, hero.camp, hero.x) / length,
                hero.z / width]
    if hero.spec.family == "luna":
        return [atk_cd, marks, cd[0], cd[1], cd[2], cd[3], has_buff]
    if hero.spec.family == "jvyoujing":
        return [marks, atk_cd, cd[0], cd[1], cd[2], has_buff,
                _clamp01(_frac(hero.hp, hero.max_hp_milli)),
                _clamp01(hero.slow_left / (3.0 * tps)),
                _clamp01(hero.stun_left / (3.0 * tps))]
    if hero.spec.family == "luban":
        return [atk_cd, marks, cd[0], cd[1], cd[2]]
    raise AssertionError(hero.spec.family)


def _vec_creeps(state: GameState, camp: int, out: list) -> None:
    cfg = state.config.engine
    length = cfg.map_length * MILLI
    width = cfg.map_width * MILLI
    ego = state.hero(camp)
    slots = nearest_enemy_creeps(state, camp, CREEP_SLOTS)
    attack_ticks = max(1, cfg.seconds_to_ticks(cfg.creep_attack_period_s))

    for i in range(CREEP_SLOTS):
        if i >= len(slots):
            out.extend([0.0] * CREEP_STATUS_WIDTH)
            continue
        creep = slots[i]
        out.append(1.0)
        out.append(_clamp01(_frac(creep.hp, creep.max_hp_milli)))
        out.append(min(1.0, creep.max_hp_milli / (3000.0 * MILLI)))
        out.append(creep.attack / 300.0)
        out.append(creep.defense / 300.0)
        out.append(creep.attack_range / (2000.0 * MILLI))
        out.append(_clamp01(creep.lane_progress_milli(length) / 1000.0))
        out.append(_visible_to(state, camp, creep.x, creep.z))
        out.append(_clamp01(creep.attack_cd / attack_ticks))
        out.append(1.0)                                   # enemy camp
        out.append((creep.wave % 10) / 10.0)
        out.append(creep.slot / CREEP_SLOTS)
    for i in range(CREEP_SLOTS):
        if i >= len(slots):
            out.extend([0.0] * CREEP_POSITION_WIDTH)
            continue
        creep = slots[i]
        _position_block(state, camp, ego, creep.x, creep.z, length, width, out,
                        in_range=dist_sq(ego.x, ego.z, creep.x, creep.z)
                        <= (ego.eff["attack_range"] * MILLI) ** 2)


def _position_block(state: GameState, camp: int, ego: HeroState, x: int, z: int,
                    length: int, width: int, out: list, in_range: bool) -> None:
    fx = _ego_x(state, camp, x)
    ex = _ego_x(state, camp, ego.x)
    out.append(fx / length)
    out.append(z / width)
    out.append((fx - ex) / length)
    out.append((z - ego.z) / width)
    out.append(min(1.0, dist(ego.x, ego.z, x, z) / length))
    out.append(1.0 if in_range else 0.0)


def _vec_structures(state: GameState, camp: int, out: list) -> None:
    cfg = state.config.engine
    length = cfg.map_length * MILLI
    width = cfg.map_width * MILLI
    ego = state.hero(camp)
    attack_ticks = max(1, cfg.seconds_to_ticks(cfg.structure_attack_period_s))
    # Slot order: ally turret, enemy turret, ally crystal, enemy crystal.
    slots = (state.turrets[camp], state.turrets[1 - camp],
             state.crystals[camp], state.crystals[1 - camp])
    for structure in slots:
        if not structure.alive:
            out.extend([0.0] * STRUCT_STATUS_WIDTH)
            continue
        is_enemy = structure.camp != camp
        is_crystal = structure.kind == "crystal"
        protected = is_crystal and state.turrets[structure.camp].alive
        out.append(1.0)
        out.append(_clamp01(_frac(structure.hp, structure.max_hp_milli)))
        out.append(min(1.0, structure.max_hp_milli / (12000.0 * MILLI)))
        out.append(structure.attack / 500.0)
        out.append(structure.attack_range / (4000.0 * MILLI))
        out.append(structure.sight / (4000.0 * MILLI))
        out.append(1.0 if is_enemy else 0.0)
        out.append(1.0 if is_crystal else 0.0)
        out.append(1.0 if (is_enemy and not protected) else 0.0)
        out.append(1.0 if not is_enemy else _visible_to(state, camp, structure.x, structure.z))
        out.append(_clamp01(structure.attack_cd / attack_ticks))
        out.append(1.0 if protected else 0.0)
    for structure in slots:
        if not structure.alive:
            out.extend([0.0] * STRUCT_POSITION_WIDTH)
            continue
        in_range = dist_sq(ego.x, ego.z, structure.x, structure.z) \
            <= (ego.eff["attack_range"] * MILLI) ** 2
        _position_block(state, camp, ego, structure.x, structure.z, length, width, out,
                        in_range=in_range)


def _period_onehot(state: GameState, out: list) -> None:
    minutes = state.clock_seconds() / 60.0
    idx = 0
    for bound in PERIOD_BOUNDS_MIN:
        if minutes >= bound:
            idx += 1
    block = [0.0] * PERIOD_WIDTH
    block[idx] = 1.0
    out.extend(block)


def encode_observation(state: GameState, camp: int) -> np.ndarray:
    """Pure function of (state, camp); float32 vector of TOTAL_WIDTH."""
    if camp not in (0, 1):
        raise ValueError(f"camp must be 0 or 1, got {camp}")
    out: list[float] = []
    ego = state.hero(camp)
    enemy = state.enemy_hero(camp)
    _hero_public(state, camp, ego, out)
    _hero_public(state, camp, enemy, out)
    _hero_skills(state, ego, out)
    _hero_skills(state, enemy, out)
    _hero_private(state, camp, out)
    _vec_creeps(state, camp, out)
    _vec_structures(state, camp, out)
    _period_onehot(state, out)
    vec = np.asarray(out, dtype=np.float32)
    assert vec.shape == (TOTAL_WIDTH,), vec.shape
    return vec
