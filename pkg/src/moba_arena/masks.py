"""Legal-action and sub-action masks derived from engine state.

The engine re-validates submitted actions against exactly these masks, so
mask computation is the single source of truth for what is playable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from moba_arena.actions import (
    BTN_ATTACK,
    BTN_EQUIPMENT,
    BTN_HEAL,
    BTN_MOVE,
    BTN_NONE,
    BTN_RECALL,
    BTN_SKILL1,
    BTN_SKILL4,
    BTN_SUMMONER,
    HEAD_SIZES,
    SUB_HEADS,
)
from moba_arena.fixedmath import dist_sq
from moba_arena.state import GameState, HeroState


@dataclass
class LegalMask:
    button: np.ndarray
    move_x: np.ndarray
    move_z: np.ndarray
    skill_x: np.ndarray
    skill_z: np.ndarray
    target: np.ndarray

    def head(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.button, self.move_x, self.move_z,
                               self.skill_x, self.skill_z, self.target])

    @staticmethod
    def from_flat(flat: np.ndarray) -> "LegalMask":
        parts = []
        offset = 0
        for size in HEAD_SIZES:
            parts.append(np.asarray(flat[offset:offset + size], dtype=np.int8))
            offset += size
        return LegalMask(*parts)


def nearest_enemy_creeps(state: GameState, camp: int, limit: int = 4):
    """Enemy creeps ordered by distance to the ego hero (tie: spawn order).

    This ordering is shared by the target head, the creep observation slots,
    and engine target resolution.
    """
    hero = state.hero(camp)
    creeps = state.alive_creeps(1 - camp)
    creeps.sort(key=lambda c: (dist_sq(hero.x, hero.z, c.x, c.z), c.wave, c.slot))
    return creeps[:limit]


def _hero_can_act(hero: HeroState) -> bool:
    return hero.alive and hero.stun_left == 0


def _skill_ready(state: GameState, hero: HeroState, slot: int) -> bool:
    if slot >= hero.skill_count():
        return False
    skill = hero.spec.skills[slot]
    return hero.skill_cd[slot] == 0 and hero.mp >= skill.mp_cost * 1000


def legal_actions(state: GameState, camp: int) -> LegalMask:
    hero = state.hero(camp)
    button = np.zeros(HEAD_SIZES[0], dtype=np.int8)
    button[BTN_NONE] = 1

    if _hero_can_act(hero):
        button[BTN_MOVE] = 1
        button[BTN_ATTACK] = 1
        for slot in range(4):
            if _skill_ready(state, hero, slot):
                button[BTN_SKILL1 + slot if slot < 3 else BTN_SKILL4] = 1
        if hero.heal_cd == 0:
            button[BTN_HEAL] = 1
        if hero.summoner_cd == 0:
            button[BTN_SUMMONER] = 1
        button[BTN_RECALL] = 1
        if hero.has_active_item() and hero.equip_cd == 0:
            button[BTN_EQUIPMENT] = 1

    # Offset heads carry no state-dependent restrictions.
    move_x = np.ones(HEAD_SIZES[1], dtype=np.int8)
    move_z = np.ones(HEAD_SIZES[2], dtype=np.int8)
    skill_x = np.ones(HEAD_SIZES[3], dtype=np.int8)
    skill_z = np.ones(HEAD_SIZES[4], dtype=np.int8)

    target = np.zeros(HEAD_SIZES[5], dtype=np.int8)
    target[0] = 1                                # none
    target[1] = 1                                # self
    if state.enemy_hero(camp).alive:
        target[2] = 1
    for i, _creep in enumerate(nearest_enemy_creeps(state, camp)):
        target[3 + i] = 1
    enemy_turret = state.turrets[1 - camp]
    enemy_crystal = state.crystals[1 - camp]
    if enemy_turret.alive or enemy_crystal.alive:
        target[7] = 1

    return LegalMask(button, move_x, move_z, skill_x, skill_z, target)


def sub_action_mask(state: GameState, camp: int) -> np.ndarray:
    """11x5 rows: which of (move_x, move_z, skill_x, skill_z, target) each button consumes."""
    hero = state.hero(camp)
    rows = np.zeros((HEAD_SIZES[0], len(SUB_HEADS)), dtype=np.int8)
    rows[BTN_MOVE, 0] = 1
    rows[BTN_MOVE, 1] = 1
    rows[BTN_ATTACK, 4] = 1
    for slot in range(hero.skill_count()):
        btn = BTN_SKILL1 + slot if slot < 3 else BTN_SKILL4
        if hero.spec.skills[slot].shape in ("bolt", "circle"):
            rows[btn, 2] = 1
            rows[btn, 3] = 1
    rows[BTN_SUMMONER, 2] = 1
    rows[BTN_SUMMONER, 3] = 1
    return rows
