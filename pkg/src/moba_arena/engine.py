"""Fixed-timestep match simulation: movement, combat, AI, economy, terminal.

Within a tick, all damage is computed from pre-tick state and applied in one
batch, so the two camps are never order-dependent. That, plus integer-only
state math and per-camp identically-seeded RNG streams, gives two exact
guarantees: bitwise replay determinism and camp mirror symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

from moba_arena.actions import (
    Action,
    BTN_ATTACK,
    BTN_EQUIPMENT,
    BTN_HEAL,
    BTN_MOVE,
    BTN_NONE,
    BTN_RECALL,
    BTN_SUMMONER,
    SKILL_BUTTONS,
    TGT_ENEMY,
    TGT_NONE,
    TGT_SELF,
    TGT_SOLDIER0,
    TGT_TOWER,
    button_skill_slot,
)
from moba_arena.config import MatchConfig
from moba_arena.fixedmath import DIR16, MILLI, clamp, dist, dist_sq, sdiv, step_toward
from moba_arena.heroes import SkillSpec, hero_ids
from moba_arena.masks import legal_actions, nearest_enemy_creeps
from moba_arena.rng import SplitMix64
from moba_arena.state import (
    Buff,
    CMD_ATTACK,
    CMD_IDLE,
    CMD_MOVE,
    Creep,
    EventLog,
    GameState,
    HeroState,
    MatchOutcome,
    OUTCOME_CAMP0,
    OUTCOME_CAMP1,
    OUTCOME_DRAW,
    REASON_CRYSTAL,
    REASON_TIME,
    Structure,
)

HERO_SIGHT = 3500 * MILLI
BOLT_HALF_WIDTH = 600 * MILLI
CIRCLE_RADIUS = 1200 * MILLI

BOLT_HALF_WIDTH_MU = 600
CIRCLE_RADIUS_MU = 1200


class IllegalActionError(ValueError):
    def __init__(self, camp: int, head: str, index: int, reason: str):
        self.camp = camp
        self.head = head
        self.index = index
        super().__init__(f"camp {camp}: illegal {head}={index}: {reason}")


class ContractError(ValueError):
    """A caller violated an operation precondition."""


@dataclass(frozen=True)
class DamageOutcome:
    hp_delta: float          # points removed from the defender
    lifesteal: float         # points credited to the attacker
    crit: bool


def mitigate_milli(raw_milli: int, defense: int, penetration: int,
                   damage_type: str, k: int = 600) -> int:
    """raw * K / (K + max(0, defense - penetration)); true damage bypasses."""
    if raw_milli < 0:
        raise ContractError(f"raw damage must be >= 0, got {raw_milli}")
    if damage_type == "true":
        return raw_milli
    eff_def = max(0, defense - penetration)
    return raw_milli * k // (k + eff_def)


def resolve_damage(attacker: dict, defender: dict, raw: float, damage_type: str,
                   rng: SplitMix64 | None = None, basic_attack: bool = False,
                   k: int = 600, crit_multiplier_milli: int = 2000) -> DamageOutcome:
    """Resolve one damage instance between effective stat dicts.

    `attacker`/`defender` carry plain-point attribute values (the engine
    passes HeroState.eff or structure stats). Crits only apply to basic
    attacks and consume one draw from the match RNG.
    """
    if raw < 0:
        raise ContractError(f"raw damage must be >= 0, got {raw}")
    if damage_type not in ("physical", "magical", "true"):
        raise ContractError(f"unknown damage type {damage_type!r}")
    raw_milli = round(raw * MILLI)
    crit = False
    if basic_attack and rng is not None:
        crit = rng.chance(attacker.get("crit_chance", 0))
        if crit:
            raw_milli = raw_milli * crit_multiplier_milli // 1000
    if damage_type == "physical":
        defense = defender.get("physical_defense", 0)
        pen = attacker.get("physical_penetration", 0)
        steal = attacker.get("physical_lifesteal", 0)
    elif damage_type == "magical":
        defense = defender.get("magical_defense", 0)
        pen = attacker.get("magical_penetration", 0)
        steal = attacker.get("magical_lifesteal", 0)
    else:
        defense = pen = steal = 0
    delta_milli = mitigate_milli(raw_milli, defense, pen, damage_type, k)
    steal_milli = delta_milli * steal // 1000
    return DamageOutcome(hp_delta=delta_milli / MILLI, lifesteal=steal_milli / MILLI, crit=crit)


def new_match(config: MatchConfig) -> GameState:
    """Fresh match at frame 0; symmetric initial placement."""
    catalog = hero_ids()
    for hero_id in (config.camp0_hero, config.camp1_hero):
        if hero_id not in catalog:
            from moba_arena.config import ConfigurationError

            raise ConfigurationError(f"unknown hero_id: {hero_id!r}")
    return GameState(config)


def terminal(state: GameState) -> MatchOutcome | None:
    """Crystal destruction wins; at the time limit the crystal-hp fraction decides."""
    if state.outcome is not None:
        return state.outcome
    c0, c1 = state.crystals
    if not c0.alive and not c1.alive:
        return MatchOutcome(OUTCOME_DRAW, state.frame_no, REASON_CRYSTAL)
    if not c0.alive:
        return MatchOutcome(OUTCOME_CAMP1, state.frame_no, REASON_CRYSTAL)
    if not c1.alive:
        return MatchOutcome(OUTCOME_CAMP0, state.frame_no, REASON_CRYSTAL)
    if state.frame_no >= state.time_limit_ticks:
        # Compare hp fractions exactly via cross-multiplication.
        lhs = c0.hp * c1.max_hp_milli
        rhs = c1.hp * c0.max_hp_milli
        if lhs > rhs:
            return MatchOutcome(OUTCOME_CAMP0, state.frame_no, REASON_TIME)
        if rhs > lhs:
            return MatchOutcome(OUTCOME_CAMP1, state.frame_no, REASON_TIME)
        return MatchOutcome(OUTCOME_DRAW, state.frame_no, REASON_TIME)
    return None


# ---------------------------------------------------------------------------
# Action validation and decoding
# ---------------------------------------------------------------------------

def validate_action(state: GameState, camp: int, action: Action) -> None:
    mask = legal_actions(state, camp)
    if not 0 <= action.button < 11:
        raise IllegalActionError(camp, "button", action.button, "index out of range")
    if not mask.button[action.button]:
        raise IllegalActionError(camp, "button", action.button, "masked off")
    sub = _consumed_heads(state.hero(camp), action.button)
    for head, size in (("move_x", 16), ("move_z", 16), ("skill_x", 16), ("skill_z", 16)):
        idx = action.head(head)
        if head in sub and not 0 <= idx < size:
            raise IllegalActionError(camp, head, idx, "index out of range")
    if "target" in sub:
        idx = action.target
        if not 0 <= idx < 8:
            raise IllegalActionError(camp, "target", idx, "index out of range")
        if not mask.target[idx]:
            raise IllegalActionError(camp, "target", idx, "masked off")


def _consumed_heads(hero: HeroState, button: int) -> set[str]:
    if button == BTN_MOVE:
        return {"move_x", "move_z"}
    if button == BTN_ATTACK:
        return {"target"}
    if button == BTN_SUMMONER:
        return {"skill_x", "skill_z"}
    if button in SKILL_BUTTONS:
        slot = button_skill_slot(button)
        if slot < hero.skill_count() and hero.spec.skills[slot].shape in ("bolt", "circle"):
            return {"skill_x", "skill_z"}
    return set()


def _aim_vector(camp: int, ix: int, iz: int) -> tuple[int, int]:
    vx = DIR16[ix][0]
    vz = DIR16[iz][1]
    if vx == 0 and vz == 0:
        return (1000, 0) if camp == 0 else (-1000, 0)   # lane-forward fallback
    return vx, vz


def _aim_point(hero: HeroState, camp: int, ix: int, iz: int, range_milli: int,
               bounds: tuple[int, int]) -> tuple[int, int]:
    vx, vz = _aim_vector(camp, ix, iz)
    norm = dist(0, 0, vx, vz)
    px = hero.x + sdiv(vx * range_milli, norm)
    pz = hero.z + sdiv(vz * range_milli, norm)
    return clamp(px, 0, bounds[0]), clamp(pz, 0, bounds[1])


# ---------------------------------------------------------------------------
# advance
# ---------------------------------------------------------------------------

def advance(state: GameState, actions: tuple[Action, Action]) -> tuple[GameState, EventLog]:
    """Simulate one decision interval under the two camps' actions.

    The returned EventLog is owned by the caller; the next advance starts a
    fresh one.
    """
    state.events = EventLog()
    if state.outcome is not None:
        state.events.warnings.append("advance on terminal state: no-op")
        return state, state.events

    for camp in (0, 1):
        validate_action(state, camp, actions[camp])

    start = state.frame_no
    _apply_buttons(state, actions)
    for _ in range(state.decision_interval):
        if state.outcome is not None:
            break
        _tick(state)
    state.frame_no = start + state.decision_interval

    if state.outcome is None:
        out = terminal(state)
        if out is not None:
            state.outcome = out
    return state, state.events


def _apply_buttons(state: GameState, actions: tuple[Action, Action]) -> None:
    # Phase 1: per-camp decode (self-directed effects); damage casts queued.
    pending: list[tuple] = []
    for camp in (0, 1):
        hero = state.hero(camp)
        action = actions[camp]
        hero.last_button = action.button
        if not hero.alive or hero.stun_left > 0:
            continue
        button = action.button
        if button != BTN_NONE:
            hero.recall_left = 0
        if button == BTN_NONE:
            hero.command = CMD_IDLE
        elif button == BTN_MOVE:
            hero.command = CMD_MOVE
            hero.move_dir = action.move_x * 16 + action.move_z
        elif button == BTN_ATTACK:
            _decode_attack(state, camp, action.target)
        elif button == BTN_HEAL:
            _cast_heal(state, hero)
        elif button == BTN_SUMMONER:
            _cast_summoner(state, hero, action)
        elif button == BTN_RECALL:
            hero.command = CMD_IDLE
            hero.recall_left = state.config.engine.recall_channel_s * state.config.engine.ticks_per_second
        elif button == BTN_EQUIPMENT:
            _cast_equipment(state, hero)
        elif button in SKILL_BUTTONS:
            pending.append((camp, action))

    # Phase 2: resolve damaging skill casts simultaneously.
    events: list[tuple] = []
    for camp, action in pending:
        _cast_skill(state, camp, action, events)
    _apply_damage_events(state, events)
    _resolve_deaths(state)


def _decode_attack(state: GameState, camp: int, target_idx: int) -> None:
    hero = state.hero(camp)
    uid = ""
    if target_idx == TGT_ENEMY:
        uid = state.enemy_hero(camp).uid
    elif TGT_SOLDIER0 <= target_idx < TGT_TOWER:
        creeps = nearest_enemy_creeps(state, camp)
        slot = target_idx - TGT_SOLDIER0
        if slot < len(creeps):
            uid = creeps[slot].uid
    elif target_idx == TGT_TOWER:
        turret = state.turrets[1 - camp]
        crystal = state.crystals[1 - camp]
        uid = turret.uid if turret.alive else crystal.uid
    elif target_idx in (TGT_NONE, TGT_SELF):
        unit = _nearest_enemy_unit(state, camp, hero.x, hero.z, HERO_SIGHT)
        uid = unit.uid if unit is not None else ""
    if uid:
        hero.command = CMD_ATTACK
        hero.target_uid = uid
    else:
        hero.command = CMD_IDLE


def _cast_heal(state: GameState, hero: HeroState) -> None:
    cfg = state.config.engine
    if hero.heal_cd > 0:
        return
    hero.hp = min(hero.max_hp_milli,
                  hero.hp + hero.max_hp_milli * cfg.heal_fraction_milli // 1000)
    hero.heal_cd = cfg.heal_cooldown_s * cfg.ticks_per_second


def _cast_summoner(state: GameState, hero: HeroState, action: Action) -> None:
    cfg = state.config.engine
    if hero.summoner_cd > 0:
        return
    bounds = (cfg.map_length * MILLI, cfg.map_width * MILLI)
    px, pz = _aim_point(hero, hero.camp, action.skill_x, action.skill_z,
                        cfg.summoner_dash_range * MILLI, bounds)
    hero.x, hero.z = px, pz
    hero.summoner_cd = cfg.summoner_cooldown_s * cfg.ticks_per_second


def _cast_equipment(state: GameState, hero: HeroState) -> None:
    item = hero.active_item()
    if item is None or hero.equip_cd > 0:
        return
    hero.hp = min(hero.max_hp_milli, hero.hp + item.active_heal * MILLI)
    hero.equip_cd = state.config.engine.seconds_to_ticks(item.active_cooldown_s)


def _cast_skill(state: GameState, camp: int, action: Action, events: list) -> None:
    cfg = state.config.engine
    hero = state.hero(camp)
    slot = button_skill_slot(action.button)
    if slot >= hero.skill_count():
        return
    skill = hero.spec.skills[slot]
    cost_milli = skill.mp_cost * MILLI
    if hero.skill_cd[slot] > 0 or hero.mp < cost_milli:
        return
    hero.mp -= cost_milli
    cd_ticks = cfg.seconds_to_ticks(skill.cooldown_s)
    cdr = hero.eff.get("cooldown_reduction", 0)
    hero.skill_cd[slot] = max(1, cd_ticks * (1000 - cdr) // 1000)
    hero.buff_marks = min(9, hero.buff_marks + 1)

    if skill.shape == "buff":
        _apply_buff(state, hero, skill)
        return

    raw = skill.damage_at(hero.skill_level())
    bounds = (cfg.map_length * MILLI, cfg.map_width * MILLI)
    targets: list = []
    if skill.shape == "bolt":
        target = _bolt_target(state, camp, hero, action, skill)
        if target is not None:
            targets = [target]
    else:  # circle
        cx, cz = _aim_point(hero, camp, action.skill_x, action.skill_z,
                            skill.range * MILLI, bounds)
        for unit in _enemy_units(state, camp):
            if dist_sq(cx, cz, unit.x, unit.z) <= CIRCLE_RADIUS * CIRCLE_RADIUS:
                targets.append(unit)

    for unit in targets:
        events.append((hero.uid, unit.uid, raw * MILLI, skill.damage_type, False))
        if skill.control is not None and isinstance(unit, HeroState):
            _apply_control(state, unit, skill)


def _apply_buff(state: GameState, hero: HeroState, skill: SkillSpec) -> None:
    cfg = state.config.engine
    buff = skill.buff
    if buff is None:
        return
    if buff.heal:
        hero.hp = min(hero.max_hp_milli, hero.hp + buff.heal * MILLI)
    if buff.duration_s > 0 and buff.deltas:
        old_max = hero.max_hp_milli
        hero.buffs.append(Buff(cfg.seconds_to_ticks(buff.duration_s), dict(buff.deltas)))
        hero.recompute_effective()
        if hero.max_hp_milli > old_max:
            hero.hp += hero.max_hp_milli - old_max


def _apply_control(state: GameState, victim: HeroState, skill: SkillSpec) -> None:
    cfg = state.config.engine
    control = skill.control
    resil = victim.eff.get("resilience", 0)
    base = min(control.duration_s, cfg.max_control_duration_s)
    ticks = cfg.seconds_to_ticks(base) * (1000 - resil) // 1000
    if ticks <= 0:
        return
    if control.kind == "stun":
        victim.stun_left = max(victim.stun_left, ticks)
        victim.command = CMD_IDLE
        victim.recall_left = 0
    else:
        victim.slow_left = max(victim.slow_left, ticks)
        victim.slow_milli = max(victim.slow_milli, control.strength_milli)


def _bolt_target(state: GameState, camp: int, hero: HeroState, action: Action,
                 skill: SkillSpec):
    """First enemy unit within a corridor along the aim direction."""
    vx, vz = _aim_vector(camp, action.skill_x, action.skill_z)
    norm = dist(0, 0, vx, vz)
    range_milli = skill.range * MILLI
    best = None
    best_key = None
    for unit in _enemy_units(state, camp):
        rx = unit.x - hero.x
        rz = unit.z - hero.z
        along = vx * rx + vz * rz          # scaled by norm
        if along < 0:
            continue
        forward = along // norm
        if forward > range_milli:
            continue
        perp = abs(vx * rz - vz * rx) // norm
        if perp > BOLT_HALF_WIDTH:
            continue
        key = (forward, 0 if isinstance(unit, HeroState) else 1, unit.uid)
        if best_key is None or key < best_key:
            best = unit
            best_key = key
    return best


def _enemy_units(state: GameState, camp: int) -> list:
    units: list = []
    enemy = state.enemy_hero(camp)
    if enemy.alive:
        units.append(enemy)
    units.extend(state.alive_creeps(1 - camp))
    return units


def _nearest_enemy_unit(state: GameState, camp: int, x: int, z: int, within: int):
    best = None
    best_key = None
    for unit in _enemy_units(state, camp):
        d = dist_sq(x, z, unit.x, unit.z)
        if d > within * within:
            continue
        key = (d, 0 if isinstance(unit, HeroState) else 1, unit.uid)
        if best_key is None or key < best_key:
            best = unit
            best_key = key
    return best


# ---------------------------------------------------------------------------
# Tick pipeline
# ---------------------------------------------------------------------------

def _tick(state: GameState) -> None:
    _decay_timers(state)
    events: list[tuple] = []
    _hero_phase(state, events)
    _creep_phase(state, events)
    _structure_phase(state, events)
    _apply_damage_events(state, events)
    _resolve_deaths(state)
    _regen_phase(state)
    _economy_phase(state)
    _spawn_phase(state)
    state.frame_no += 1
    if state.outcome is None:
        c0, c1 = state.crystals
        if not c0.alive or not c1.alive:
            state.outcome = terminal(state)


def _decay_timers(state: GameState) -> None:
    cfg = state.config.engine
    for hero in state.heroes:
        for slot in range(4):
            if hero.skill_cd[slot] > 0:
                hero.skill_cd[slot] -= 1
        if hero.heal_cd > 0:
            hero.heal_cd -= 1
        if hero.summoner_cd > 0:
            hero.summoner_cd -= 1
        if hero.equip_cd > 0:
            hero.equip_cd -= 1
        if hero.attack_cd > 0:
            hero.attack_cd -= 1
        if hero.stun_left > 0:
            hero.stun_left -= 1
        if hero.slow_left > 0:
            hero.slow_left -= 1
            if hero.slow_left == 0:
                hero.slow_milli = 0
        expired = False
        for buff in hero.buffs:
            buff.ticks_left -= 1
            if buff.ticks_left <= 0:
                expired = True
        if expired:
            hero.buffs = [b for b in hero.buffs if b.ticks_left > 0]
            old_max = hero.max_hp_milli
            hero.recompute_effective()
            if hero.max_hp_milli < old_max:
                hero.hp = min(hero.hp, hero.max_hp_milli)
        if hero.recall_left > 0:
            hero.recall_left -= 1
            if hero.recall_left == 0:
                _teleport_home(state, hero)
        if not hero.alive and hero.respawn_left > 0:
            hero.respawn_left -= 1
            if hero.respawn_left == 0:
                _respawn(state, hero)
    for creep in state.creeps:
        if creep.alive and creep.attack_cd > 0:
            creep.attack_cd -= 1
    for structure in state.turrets + state.crystals:
        if structure.alive and structure.attack_cd > 0:
            structure.attack_cd -= 1


def _teleport_home(state: GameState, hero: HeroState) -> None:
    cfg = state.config.engine
    home_x = cfg.hero_spawn_x * MILLI
    if hero.camp == 1:
        home_x = cfg.map_length * MILLI - home_x
    hero.x = home_x
    hero.z = cfg.lane_z * MILLI
    hero.command = CMD_IDLE


def _respawn(state: GameState, hero: HeroState) -> None:
    hero.alive = True
    _teleport_home(state, hero)
    hero.hp = hero.max_hp_milli
    hero.mp = hero.max_mp_milli
    hero.stun_left = 0
    hero.slow_left = 0
    hero.slow_milli = 0


def _move_step_milli(cfg, speed_mu_s: int, slow_milli: int) -> int:
    effective = speed_mu_s * (1000 - slow_milli) // 1000
    return max(0, effective * MILLI // cfg.ticks_per_second)


def _hero_phase(state: GameState, events: list) -> None:
    cfg = state.config.engine
    bounds_x = cfg.map_length * MILLI
    bounds_z = cfg.map_width * MILLI
    moves: list[tuple[HeroState, int, int]] = []
    for hero in state.heroes:
        if not hero.alive or hero.stun_left > 0 or hero.recall_left > 0:
            continue
        if hero.command == CMD_MOVE:
            vx = DIR16[hero.move_dir // 16][0]
            vz = DIR16[hero.move_dir % 16][1]
            if vx == 0 and vz == 0:
                continue
            norm = dist(0, 0, vx, vz)
            step = _move_step_milli(cfg, hero.eff["move_speed"], hero.slow_milli)
            nx = clamp(hero.x + sdiv(vx * step, norm), 0, bounds_x)
            nz = clamp(hero.z + sdiv(vz * step, norm), 0, bounds_z)
            moves.append((hero, nx, nz))
        elif hero.command == CMD_ATTACK:
            target = state.unit_by_uid(hero.target_uid)
            if target is None or not target.alive:
                hero.command = CMD_IDLE
                hero.target_uid = ""
                continue
            if isinstance(target, Structure) and target.kind == "crystal" \
                    and state.turrets[target.camp].alive:
                # Protected crystal: push the turret instead.
                target = state.turrets[target.camp]
                hero.target_uid = target.uid
            attack_range = hero.eff["attack_range"] * MILLI
            if dist_sq(hero.x, hero.z, target.x, target.z) <= attack_range * attack_range:
                if hero.attack_cd == 0:
                    raw_milli = hero.eff["physical_attack"] * MILLI
                    events.append((hero.uid, target.uid, raw_milli, "physical", True))
                    aspd = max(100, hero.eff["attack_speed"])
                    hero.attack_cd = max(1, round(cfg.ticks_per_second * 1000 / aspd))
            else:
                step = _move_step_milli(cfg, hero.eff["move_speed"], hero.slow_milli)
                nx, nz = step_toward(hero.x, hero.z, target.x, target.z, step)
                moves.append((hero, clamp(nx, 0, bounds_x), clamp(nz, 0, bounds_z)))
    for hero, nx, nz in moves:
        hero.x, hero.z = nx, nz


def _creep_phase(state: GameState, events: list) -> None:
    cfg = state.config.engine
    step = cfg.creep_move_speed * MILLI // cfg.ticks_per_second
    attack_ticks = cfg.seconds_to_ticks(cfg.creep_attack_period_s)
    moves: list[tuple[Creep, int, int]] = []
    alive_by_camp = (state.alive_creeps(0), state.alive_creeps(1))
    for creep in state.creeps:
        if not creep.alive:
            continue
        target = _acquire_creep_target(state, creep, alive_by_camp[1 - creep.camp])
        if target is not None:
            d_sq = dist_sq(creep.x, creep.z, target.x, target.z)
            if d_sq <= creep.attack_range * creep.attack_range:
                if creep.attack_cd == 0:
                    events.append((creep.uid, target.uid, creep.attack * MILLI, "physical", False))
                    creep.attack_cd = attack_ticks
                continue
            nx, nz = step_toward(creep.x, creep.z, target.x, target.z, step)
            moves.append((creep, nx, nz))
            continue
        # Walk the lane toward the enemy crystal.
        goal = state.crystals[1 - creep.camp]
        nx, nz = step_toward(creep.x, creep.z, goal.x, goal.z, step)
        moves.append((creep, nx, nz))
    for creep, nx, nz in moves:
        creep.x, creep.z = nx, nz


def _acquire_creep_target(state: GameState, creep: Creep, enemy_creeps: list):
    """Nearest enemy in sight; creeps > heroes > structures."""
    enemy_camp = 1 - creep.camp
    best = None
    best_key = None
    for unit in enemy_creeps:
        d = dist_sq(creep.x, creep.z, unit.x, unit.z)
        if d <= creep.sight * creep.sight and (best_key is None or (0, d, unit.uid) < best_key):
            best, best_key = unit, (0, d, unit.uid)
    hero = state.heroes[enemy_camp]
    if hero.alive:
        d = dist_sq(creep.x, creep.z, hero.x, hero.z)
        if d <= creep.sight * creep.sight and (best_key is None or (1, d, hero.uid) < best_key):
            best, best_key = hero, (1, d, hero.uid)
    turret = state.turrets[enemy_camp]
    crystal = state.crystals[enemy_camp]
    for structure in (turret, crystal):
        if not structure.alive:
            continue
        if structure.kind == "crystal" and turret.alive:
            continue                       # protected, not worth targeting
        d = dist_sq(creep.x, creep.z, structure.x, structure.z)
        reach = creep.sight
        if d <= reach * reach and (best_key is None or (2, d, structure.uid) < best_key):
            best, best_key = structure, (2, d, structure.uid)
    return best


def _structure_phase(state: GameState, events: list) -> None:
    cfg = state.config.engine
    attack_ticks = cfg.seconds_to_ticks(cfg.structure_attack_period_s)
    alive_by_camp = (state.alive_creeps(0), state.alive_creeps(1))
    for structure in state.turrets + state.crystals:
        if not structure.alive or structure.attack_cd > 0:
            continue
        enemy_camp = 1 - structure.camp
        reach_sq = structure.attack_range * structure.attack_range
        best = None
        best_key = None
        for unit in alive_by_camp[enemy_camp]:
            d = dist_sq(structure.x, structure.z, unit.x, unit.z)
            if d <= reach_sq and (best_key is None or (0, d, unit.uid) < best_key):
                best, best_key = unit, (0, d, unit.uid)
        hero = state.heroes[enemy_camp]
        if hero.alive:
            d = dist_sq(structure.x, structure.z, hero.x, hero.z)
            if d <= reach_sq and (best_key is None or (1, d, hero.uid) < best_key):
                best, best_key = hero, (1, d, hero.uid)
        if best is None:
            continue
        events.append((structure.uid, best.uid, structure.attack * MILLI, "physical", False))
        structure.attack_cd = attack_ticks


def _defender_stats(unit) -> dict:
    if isinstance(unit, HeroState):
        return unit.eff
    return {"physical_defense": unit.defense, "magical_defense": unit.defense}


def _apply_damage_events(state: GameState, events: list) -> None:
    """Resolve queued damage as one simultaneous batch.

    All deltas are computed from pre-batch state, then damage is applied,
    then lifesteal; per-event application would make outcomes depend on camp
    processing order and break mirror symmetry.
    """
    cfg = state.config.engine
    from moba_arena.state import DamageRecord

    damage_acc: dict[str, int] = {}
    gain_acc: dict[str, int] = {}
    for attacker_uid, target_uid, raw_milli, dtype, basic in events:
        target = state.unit_by_uid(target_uid)
        if target is None or not target.alive:
            continue
        if isinstance(target, Structure) and target.kind == "crystal" \
                and state.turrets[target.camp].alive:
            continue                       # crystal is invulnerable behind its turret
        attacker = state.unit_by_uid(attacker_uid)
        if attacker is None:
            continue
        if isinstance(attacker, HeroState):
            stats = attacker.eff
            rng = state.rng[attacker.camp]
        else:
            stats = {"physical_attack": attacker.attack}
            rng = None
        outcome = resolve_damage(stats, _defender_stats(target), raw_milli / MILLI, dtype,
                                 rng=rng, basic_attack=basic,
                                 k=cfg.mitigation_constant,
                                 crit_multiplier_milli=cfg.crit_multiplier_milli)
        delta_milli = round(outcome.hp_delta * MILLI)
        damage_acc[target_uid] = damage_acc.get(target_uid, 0) + delta_milli
        if isinstance(attacker, HeroState) and outcome.lifesteal > 0:
            gain = round(outcome.lifesteal * MILLI)
            gain_acc[attacker_uid] = gain_acc.get(attacker_uid, 0) + gain
        if isinstance(target, HeroState):
            target.recall_left = 0         # any damage cancels the recall channel
            if isinstance(attacker, HeroState):
                attacker.hero_damage_milli += delta_milli
        state.events.damage.append(DamageRecord(
            attacker=attacker_uid, target=target_uid,
            amount_milli=delta_milli, damage_type=dtype, crit=outcome.crit))

    for uid, dmg in damage_acc.items():
        unit = state.unit_by_uid(uid)
        if unit is not None:
            unit.hp -= dmg
    for uid, gain in gain_acc.items():
        unit = state.unit_by_uid(uid)
        if unit is not None and unit.hp > 0:
            unit.hp = min(unit.max_hp_milli, unit.hp + gain)


def _damage_sources_this_tick(state: GameState, target_uid: str) -> list[str]:
    return [rec.attacker for rec in state.events.damage if rec.target == target_uid]


def _resolve_deaths(state: GameState) -> None:
    cfg = state.config.engine
    for creep in state.creeps:
        if creep.alive and creep.hp <= 0:
            creep.alive = False
            killer = _killing_hero(state, creep.uid, 1 - creep.camp)
            if killer is not None:
                killer.gold += cfg.lasthit_gold
                killer.total_gold += cfg.lasthit_gold
                killer.exp += cfg.lasthit_exp
                state.events.last_hits.append((killer.uid, creep.uid))
    state.creeps = [c for c in state.creeps if c.alive]

    for hero in state.heroes:
        if hero.alive and hero.hp <= 0:
            hero.alive = False
            hero.deaths += 1
            hero.hp = 0
            hero.respawn_left = (cfg.respawn_base_s + cfg.respawn_per_level_s * hero.level) * cfg.ticks_per_second
            hero.command = CMD_IDLE
            hero.recall_left = 0
            hero.stun_left = 0
            hero.slow_left = 0
            hero.slow_milli = 0
            if hero.buffs:
                hero.buffs = []
                hero.recompute_effective()
            enemy = state.enemy_hero(hero.camp)
            killer = _killing_hero(state, hero.uid, enemy.camp)
            killer_uid = killer.uid if killer is not None else f"camp{enemy.camp}"
            if killer is not None:
                killer.kills += 1
                killer.gold += cfg.kill_gold
                killer.total_gold += cfg.kill_gold
                killer.exp += cfg.kill_exp
            state.events.kills.append((killer_uid, hero.uid))

    for structure in state.turrets + state.crystals:
        if structure.alive and structure.hp <= 0:
            structure.alive = False
            structure.hp = 0
            sources = _damage_sources_this_tick(state, structure.uid)
            state.events.structure_kills.append((sources[0] if sources else "", structure.uid))


def _killing_hero(state: GameState, victim_uid: str, camp: int) -> HeroState | None:
    hero = state.heroes[camp]
    if hero.uid in _damage_sources_this_tick(state, victim_uid):
        return hero
    return None


def _regen_phase(state: GameState) -> None:
    cfg = state.config.engine
    tps = cfg.ticks_per_second
    for hero in state.heroes:
        if not hero.alive:
            continue
        hero.hp = min(hero.max_hp_milli, hero.hp + hero.eff["hp_regen"] * MILLI // tps)
        hero.mp = min(hero.max_mp_milli, hero.mp + hero.eff["mp_regen"] * MILLI // tps)


def _economy_phase(state: GameState) -> None:
    cfg = state.config.engine
    if state.frame_no % cfg.ticks_per_second == 0:
        for hero in state.heroes:
            hero.gold += cfg.passive_gold_per_s
            hero.total_gold += cfg.passive_gold_per_s
            hero.exp += cfg.passive_exp_per_s
    for hero in state.heroes:
        _level_ups(state, hero)
        _purchase_items(hero)


def _level_ups(state: GameState, hero: HeroState) -> None:
    cfg = state.config.engine
    while hero.level < cfg.level_cap:
        need = cfg.exp_curve * (hero.level + 1) ** 2
        if hero.exp < need:
            break
        hero.level += 1
        old_max_hp = hero.max_hp_milli
        old_max_mp = hero.max_mp_milli
        hero.recompute_effective()
        hero.hp = min(hero.max_hp_milli, hero.hp + (hero.max_hp_milli - old_max_hp))
        hero.mp = min(hero.max_mp_milli, hero.mp + (hero.max_mp_milli - old_max_mp))


def _purchase_items(hero: HeroState) -> None:
    while hero.items_bought < len(hero.spec.items):
        item = hero.spec.items[hero.items_bought]
        if hero.gold < item.cost:
            break
        hero.gold -= item.cost
        hero.items_bought += 1
        old_max_hp = hero.max_hp_milli
        old_max_mp = hero.max_mp_milli
        hero.recompute_effective()
        if hero.max_hp_milli > old_max_hp:
            hero.hp += hero.max_hp_milli - old_max_hp
        if hero.max_mp_milli > old_max_mp:
            hero.mp += hero.max_mp_milli - old_max_mp


def _spawn_phase(state: GameState) -> None:
    cfg = state.config.engine
    if state.frame_no < state.next_wave_tick:
        return
    state.next_wave_tick += cfg.creep_wave_period_s * cfg.ticks_per_second
    wave = state.wave_counter
    state.wave_counter += 1
    lane_z = cfg.lane_z * MILLI
    for camp in (0, 1):
        base_x = cfg.creep_spawn_x * MILLI
        if camp == 1:
            base_x = cfg.map_length * MILLI - base_x
        for slot in range(cfg.creeps_per_wave):
            offset = slot * cfg.creep_spacing * MILLI
            x = base_x - offset if camp == 0 else base_x + offset
            state.creeps.append(Creep(camp, wave, slot, x, lane_z, cfg))
