"""Per-interval reward decomposition with configurable weights.

Dense components come from state deltas between consecutive decision
boundaries; sparse components from the interval's event log. The total is
always the literal weighted sum, so decomposition is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from moba_arena.actions import BTN_NONE
from moba_arena.config import RewardWeights
from moba_arena.state import EventLog, GameState, MatchOutcome

COMPONENT_NAMES = ("hp_point", "tower_hp_point", "money", "ep_rate",
                   "death", "kill", "exp", "win", "lose", "no_op")


@dataclass(frozen=True)
class RewardSnapshot:
    """Scalar values captured at a decision boundary, per camp."""

    hp_frac: float
    mp_frac: float
    total_gold: int
    exp: int
    enemy_turret_frac: float
    enemy_crystal_frac: float

    @staticmethod
    def capture(state: GameState, camp: int) -> "RewardSnapshot":
        hero = state.hero(camp)
        turret = state.turrets[1 - camp]
        crystal = state.crystals[1 - camp]
        return RewardSnapshot(
            hp_frac=hero.hp / hero.max_hp_milli if hero.max_hp_milli else 0.0,
            mp_frac=hero.mp / hero.max_mp_milli if hero.max_mp_milli else 0.0,
            total_gold=hero.total_gold,
            exp=hero.exp,
            enemy_turret_frac=turret.hp / turret.max_hp_milli,
            enemy_crystal_frac=crystal.hp / crystal.max_hp_milli,
        )


@dataclass
class RewardBreakdown:
    components: dict[str, float]
    weights: dict[str, float]
    total: float = field(init=False)

    def __post_init__(self) -> None:
        self.total = sum(self.weights[name] * value
                         for name, value in self.components.items())


def compute_reward(prev: RewardSnapshot, state: GameState, camp: int,
                   events: EventLog, weights: RewardWeights,
                   outcome: MatchOutcome | None = None,
                   acted_button: int | None = None) -> RewardBreakdown:
    now = RewardSnapshot.capture(state, camp)
    ego_uid = state.hero(camp).uid
    enemy_uid = state.enemy_hero(camp).uid

    died = any(victim == ego_uid for _, victim in events.kills)
    killed = any(victim == enemy_uid for _, victim in events.kills)

    tower_progress = (prev.enemy_turret_frac - now.enemy_turret_frac) \
        + (prev.enemy_crystal_frac - now.enemy_crystal_frac)

    win = lose = 0.0
    if outcome is not None and outcome.winner != "draw":
        won = (outcome.winner == "camp0-win") == (camp == 0)
        win = 1.0 if won else 0.0
        lose = 0.0 if won else 1.0

    components = {
        "hp_point": now.hp_frac - prev.hp_frac,
        "tower_hp_point": tower_progress,
        "money": float(now.total_gold - prev.total_gold),
        "ep_rate": now.mp_frac - prev.mp_frac,
        "death": 1.0 if died else 0.0,
        "kill": 1.0 if killed else 0.0,
        "exp": float(now.exp - prev.exp),
        "win": win,
        "lose": lose,
        "no_op": 1.0 if acted_button == BTN_NONE else 0.0,
    }
    return RewardBreakdown(components=components, weights=weights.as_dict())
