"""Scripted behavior-tree opponents at three difficulty levels.

Decision priority: survive > kill > push > farm > advance along the lane.
Levels differ in reaction delay, engagement thresholds, and farming
discipline; they are calibrated only for ladder monotonicity.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources

import yaml

from moba_arena.actions import (
    Action,
    BTN_ATTACK,
    BTN_HEAL,
    BTN_MOVE,
    BTN_NONE,
    BTN_RECALL,
    BTN_SKILL1,
    BTN_SKILL4,
    TGT_ENEMY,
    TGT_SOLDIER0,
    TGT_TOWER,
    skill_button_index,
)
from moba_arena.fixedmath import DIR16, MILLI, dist_sq
from moba_arena.masks import legal_actions, nearest_enemy_creeps
from moba_arena.state import GameState

THREAT_RANGE = 4500 * MILLI
SAFE_RANGE = 6500 * MILLI
PUSH_RANGE = 7000 * MILLI
FARM_RANGE = 4000 * MILLI
HEAL_HP_MILLI = 250


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BtProfile:
    hero_id: str
    level: int
    reaction_delay: int       # decision intervals between re-decisions
    engage_hp_milli: int
    retreat_hp_milli: int
    aggressiveness_milli: int
    initiate_hp_milli: int        # min own hp fraction to start a fight
    aim_error: int                # skill-offset error, 22.5-degree steps
    last_hit_discipline: bool


@functools.lru_cache(maxsize=1)
def _profile_payload() -> dict:
    text = resources.files("moba_arena").joinpath("data/bt_profiles.yaml").read_text()
    return yaml.safe_load(text)


def _level_params() -> dict[int, dict]:
    return {int(k): v for k, v in _profile_payload()["levels"].items()}


def _type_overrides() -> dict[str, dict[int, dict]]:
    raw = _profile_payload().get("type_overrides") or {}
    return {t: {int(k): v for k, v in levels.items()} for t, levels in raw.items()}


def bt_profile(hero_id: str, level: int) -> BtProfile:
    params = _level_params().get(level)
    if params is None:
        raise CalibrationError(f"no BT profile for level {level}")
    from moba_arena.heroes import get_hero

    overrides = _type_overrides().get(get_hero(hero_id).hero_type, {}).get(level)
    if overrides:
        params = {**params, **overrides}
    return BtProfile(
        hero_id=hero_id,
        level=level,
        reaction_delay=int(params["reaction_delay"]),
        engage_hp_milli=int(params["engage_hp"]),
        retreat_hp_milli=int(params["retreat_hp"]),
        aggressiveness_milli=int(params["aggressiveness"]),
        initiate_hp_milli=int(params.get("initiate_hp", 450)),
        aim_error=int(params.get("aim_error", 0)),
        last_hit_discipline=bool(params["last_hit_discipline"]),
    )


def _aim_indices(dx: int, dz: int) -> tuple[int, int]:
    """Offset-head indices whose direction vector best matches (dx, dz)."""
    norm = max(1, int((dx * dx + dz * dz) ** 0.5))
    best_x = min(range(16), key=lambda i: abs(DIR16[i][0] * norm - 1000 * dx))
    best_z = min(range(16), key=lambda i: abs(DIR16[i][1] * norm - 1000 * dz))
    return best_x, best_z


def _move_toward(state: GameState, camp: int, tx: int, tz: int) -> Action:
    hero = state.hero(camp)
    ix, iz = _aim_indices(tx - hero.x, tz - hero.z)
    return Action(button=BTN_MOVE, move_x=ix, move_z=iz)


def bt_decide(state: GameState, camp: int, profile: BtProfile) -> Action:
    """One decision of the priority tree; the result always passes the mask."""
    hero = state.hero(camp)
    enemy = state.enemy_hero(camp)
    mask = legal_actions(state, camp)
    if not hero.alive or hero.stun_left > 0:
        return Action()

    hp_frac_milli = hero.hp * 1000 // hero.max_hp_milli if hero.max_hp_milli else 0
    enemy_dist_sq = dist_sq(hero.x, hero.z, enemy.x, enemy.z) if enemy.alive else None
    enemy_near = enemy.alive and enemy_dist_sq <= THREAT_RANGE * THREAT_RANGE
    home = state.crystals[camp]

    # Survive.
    if hp_frac_milli < HEAL_HP_MILLI and mask.button[BTN_HEAL]:
        return Action(button=BTN_HEAL)
    if hp_frac_milli < profile.retreat_hp_milli:
        threat = enemy_near or _nearest_creep_dist_sq(state, camp) is not None
        if not threat and mask.button[BTN_RECALL] and hero.recall_left == 0 \
                and hp_frac_milli < profile.retreat_hp_milli // 2:
            return Action(button=BTN_RECALL)
        if enemy_near:
            return _move_toward(state, camp, home.x, home.z)
        if hero.recall_left > 0:
            return Action()                 # keep channeling

    # Never sit in enemy structure fire without creeps tanking it.
    enemy_turret = state.turrets[1 - camp]
    guard = _active_enemy_structure(state, camp)
    outranges_guard = guard is not None \
        and hero.eff["attack_range"] * MILLI > guard.attack_range + 100 * MILLI
    if guard is not None and not outranges_guard \
            and not _ally_creeps_tanking(state, camp, guard) \
            and _within(hero, guard, guard.attack_range + 400 * MILLI):
        return _move_toward(state, camp, home.x, home.z)

    # Kill: fight only inside the leash range, never chase across the map.
    # Aggressive profiles initiate at full enemy hp; passive ones only punish.
    if enemy_near:
        enemy_hp_milli = enemy.hp * 1000 // enemy.max_hp_milli
        initiates = profile.aggressiveness_milli >= 400 \
            and hp_frac_milli > profile.initiate_hp_milli
        want_fight = initiates \
            or (enemy_hp_milli < profile.aggressiveness_milli
                and hp_frac_milli > profile.retreat_hp_milli + 150) \
            or enemy_hp_milli + 200 < hp_frac_milli \
            or enemy_hp_milli < 250
        if want_fight:
            for slot in range(hero.skill_count()):
                skill = hero.spec.skills[slot]
                if skill.shape == "buff":
                    continue
                button = skill_button_index(slot)
                if not mask.button[button]:
                    continue
                if not initiates and enemy_hp_milli >= profile.engage_hp_milli \
                        and enemy_hp_milli >= hp_frac_milli:
                    continue
                reach = skill.range * MILLI
                if enemy_dist_sq <= reach * reach:
                    ix, iz = _aim_indices(enemy.x - hero.x, enemy.z - hero.z)
                    if profile.aim_error:
                        spread = 2 * profile.aim_error + 1
                        rng = state.rng[camp]
                        ix = (ix + rng.next_below(spread) - profile.aim_error) % 16
                        iz = (iz + rng.next_below(spread) - profile.aim_error) % 16
                    return Action(button=button, skill_x=ix, skill_z=iz)
            attack_reach = (hero.eff["attack_range"] + 1500) * MILLI
            if enemy_dist_sq <= attack_reach * attack_reach and mask.target[TGT_ENEMY] \
                    and mask.button[BTN_ATTACK]:
                return Action(button=BTN_ATTACK, target=TGT_ENEMY)

    # Kite out of creep packs instead of trading hp with them (below the kill
    # branch: hero duels are worth some creep damage).
    if hp_frac_milli < 900 and _creep_pressure(state, camp) >= 2:
        return _move_toward(state, camp, home.x, home.z)

    # Defend: clear enemy creeps sieging our own structures.
    siege_target = _own_structure_under_siege(state, camp)
    if siege_target is not None:
        creeps = nearest_enemy_creeps(state, camp)
        for i, creep in enumerate(creeps):
            if dist_sq(hero.x, hero.z, creep.x, creep.z) <= FARM_RANGE * FARM_RANGE \
                    and mask.button[BTN_ATTACK] and mask.target[TGT_SOLDIER0 + i]:
                return Action(button=BTN_ATTACK, target=TGT_SOLDIER0 + i)
        if mask.button[BTN_MOVE]:
            return _move_toward(state, camp, siege_target.x, siege_target.z)

    # Push when the window is open (enemy dead, far, or clearly weaker) and
    # the structure is busy with ally creeps (or nearly dead).
    objective = enemy_turret if enemy_turret.alive else state.crystals[1 - camp]
    window = (not enemy.alive) or (not enemy_near)
    if enemy.alive and enemy_dist_sq is not None:
        enemy_hp_milli = enemy.hp * 1000 // enemy.max_hp_milli
        window = window or enemy_hp_milli + 300 < hp_frac_milli
    # Commit to nearly-dead objectives and to the endgame crystal race.
    objective_frac = objective.hp * 1000 // objective.max_hp_milli
    if hp_frac_milli > 400 and (objective_frac < 250 or objective.kind == "crystal"):
        window = True
    safe_to_hit = guard is None \
        or (outranges_guard and objective is guard) \
        or _ally_creeps_tanking(state, camp, guard) \
        or guard.hp * 1000 // guard.max_hp_milli < 120
    if objective.alive and window and safe_to_hit and mask.button[BTN_ATTACK] \
            and mask.target[TGT_TOWER] \
            and dist_sq(hero.x, hero.z, objective.x, objective.z) <= PUSH_RANGE * PUSH_RANGE:
        return Action(button=BTN_ATTACK, target=TGT_TOWER)

    # Farm.
    creeps = nearest_enemy_creeps(state, camp)
    if creeps and mask.button[BTN_ATTACK]:
        pick = None
        if profile.last_hit_discipline:
            basic_milli = hero.eff["physical_attack"] * MILLI
            for i, creep in enumerate(creeps):
                if creep.hp <= basic_milli:
                    pick = i
                    break
        if pick is None:
            pick = 0
        creep = creeps[pick]
        if dist_sq(hero.x, hero.z, creep.x, creep.z) <= FARM_RANGE * FARM_RANGE \
                and mask.target[TGT_SOLDIER0 + pick]:
            return Action(button=BTN_ATTACK, target=TGT_SOLDIER0 + pick)

    # Advance toward the enemy base; without tanking creeps, hold at a safe
    # siege point outside the guarding structure's reach.
    goal = state.crystals[1 - camp]
    if mask.button[BTN_MOVE]:
        if guard is not None and not _ally_creeps_tanking(state, camp, guard):
            margin = guard.attack_range + 700 * MILLI
            if dist_sq(hero.x, hero.z, guard.x, guard.z) <= margin * margin:
                return Action()             # wait at the siege line for creeps
        return _move_toward(state, camp, goal.x, goal.z)
    return Action()


def _active_enemy_structure(state: GameState, camp: int):
    """The structure currently defending the enemy's side of the lane."""
    turret = state.turrets[1 - camp]
    if turret.alive:
        return turret
    crystal = state.crystals[1 - camp]
    return crystal if crystal.alive else None


def _within(hero, structure, reach: int) -> bool:
    return dist_sq(hero.x, hero.z, structure.x, structure.z) <= reach * reach


def _ally_creeps_tanking(state: GameState, camp: int, structure,
                         minimum: int = 1) -> bool:
    reach = structure.attack_range
    count = 0
    for creep in state.alive_creeps(camp):
        if dist_sq(creep.x, creep.z, structure.x, structure.z) <= reach * reach:
            count += 1
            if count >= minimum:
                return True
    return False


def _nearest_creep_dist_sq(state: GameState, camp: int):
    hero = state.hero(camp)
    best = None
    for creep in state.alive_creeps(1 - camp):
        d = dist_sq(hero.x, hero.z, creep.x, creep.z)
        if d <= THREAT_RANGE * THREAT_RANGE and (best is None or d < best):
            best = d
    return best


def _creep_pressure(state: GameState, camp: int, radius: int = 1000 * MILLI) -> int:
    hero = state.hero(camp)
    return sum(1 for creep in state.alive_creeps(1 - camp)
               if dist_sq(hero.x, hero.z, creep.x, creep.z) <= radius * radius)


def _own_structure_under_siege(state: GameState, camp: int):
    """Own turret/crystal with enemy creeps inside its attack range, when the
    hero is close enough for the defense to matter."""
    hero = state.hero(camp)
    turret = state.turrets[camp]
    crystal = state.crystals[camp]
    for structure, reach_limit in ((crystal, None), (turret, 12000 * MILLI)):
        if not structure.alive:
            continue
        if reach_limit is not None \
                and dist_sq(hero.x, hero.z, structure.x, structure.z) > reach_limit ** 2:
            continue
        for creep in state.alive_creeps(1 - camp):
            if dist_sq(creep.x, creep.z, structure.x, structure.z) \
                    <= structure.attack_range * structure.attack_range:
                return structure
    return None


class BtAgent:
    """Stateful wrapper adding the per-level reaction delay."""

    def __init__(self, profile: BtProfile):
        self.profile = profile
        self._cached = Action()
        self._last_decision_frame: int | None = None

    def __call__(self, state: GameState, camp: int) -> Action:
        interval = state.decision_interval
        due = (self._last_decision_frame is None
               or state.frame_no - self._last_decision_frame
               >= self.profile.reaction_delay * interval)
        if due:
            self._cached = bt_decide(state, camp, self.profile)
            self._last_decision_frame = state.frame_no
            return self._cached
        if _action_still_legal(state, camp, self._cached):
            return self._cached
        return Action()


def _action_still_legal(state: GameState, camp: int, action: Action) -> bool:
    mask = legal_actions(state, camp)
    if not mask.button[action.button]:
        return False
    if action.button == BTN_ATTACK and not mask.target[action.target]:
        return False
    return True


def make_bt_controller(hero_id: str, level: int) -> BtAgent:
    return BtAgent(bt_profile(hero_id, level))


def calibrate_ladder(hero_ids: list[str] | None = None, n_matches: int = 50,
                     min_win_rate: float = 0.7, seed: int = 0,
                     time_limit_s: int = 600) -> dict:
    """Round-robin adjacent-level matches; asserts ladder monotonicity."""
    from moba_arena.evalarena.matches import run_matches

    if hero_ids is None:
        hero_ids = ["diaochan"]
    levels = sorted(_level_params())
    if len(levels) < 2:
        raise CalibrationError("need at least two BT levels to calibrate")
    report: dict = {"pairs": [], "passed": True}
    for hero_id in hero_ids:
        for low, high in zip(levels, levels[1:]):
            stats = run_matches(f"bt:{high}", f"bt:{low}",
                                task=(hero_id, hero_id), n=n_matches,
                                paired_seeds=True, seed=seed,
                                time_limit_s=time_limit_s)
            entry = {
                "hero": hero_id,
                "high": high,
                "low": low,
                "win_rate": stats.win_rate_a,
                "required": min_win_rate,
                "ok": stats.win_rate_a >= min_win_rate,
            }
            report["pairs"].append(entry)
            if not entry["ok"]:
                report["passed"] = False
                report["failing_pair"] = (hero_id, high, low)
    return report
