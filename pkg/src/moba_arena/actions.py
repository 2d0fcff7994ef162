"""The hierarchical action triplet and per-button sub-action dependencies."""

from __future__ import annotations

from dataclasses import dataclass

BUTTON_NAMES = (
    "none", "move", "attack", "skill1", "skill2", "skill3",
    "heal", "summoner", "recall", "skill4", "equipment",
)
BTN_NONE = 0
BTN_MOVE = 1
BTN_ATTACK = 2
BTN_SKILL1 = 3
BTN_SKILL2 = 4
BTN_SKILL3 = 5
BTN_HEAL = 6
BTN_SUMMONER = 7
BTN_RECALL = 8
BTN_SKILL4 = 9
BTN_EQUIPMENT = 10
SKILL_BUTTONS = (BTN_SKILL1, BTN_SKILL2, BTN_SKILL3, BTN_SKILL4)

TARGET_NAMES = ("none", "self", "enemy", "soldier1", "soldier2", "soldier3", "soldier4", "tower")
TGT_NONE = 0
TGT_SELF = 1
TGT_ENEMY = 2
TGT_SOLDIER0 = 3
TGT_TOWER = 7

HEAD_NAMES = ("button", "move_x", "move_z", "skill_x", "skill_z", "target")
HEAD_SIZES = (11, 16, 16, 16, 16, 8)
SUB_HEADS = ("move_x", "move_z", "skill_x", "skill_z", "target")


@dataclass(frozen=True)
class Action:
    button: int = 0
    move_x: int = 0
    move_z: int = 0
    skill_x: int = 0
    skill_z: int = 0
    target: int = 0

    def as_list(self) -> list[int]:
        return [self.button, self.move_x, self.move_z, self.skill_x, self.skill_z, self.target]

    @staticmethod
    def from_list(values) -> "Action":
        if len(values) != 6:
            raise ValueError(f"action must have 6 head indices, got {len(values)}")
        return Action(*[int(v) for v in values])

    def head(self, name: str) -> int:
        return getattr(self, name)


def skill_button_index(skill_idx: int) -> int:
    """Skill slot 0..3 -> button index."""
    return (BTN_SKILL1, BTN_SKILL2, BTN_SKILL3, BTN_SKILL4)[skill_idx]


def button_skill_slot(button: int) -> int:
    return {BTN_SKILL1: 0, BTN_SKILL2: 1, BTN_SKILL3: 2, BTN_SKILL4: 3}[button]
