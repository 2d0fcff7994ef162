"""Match scheduling and aggregate metrics (win rate, reward, hurt-per-frame).

Contestants resolve from strings ("bt:2" or a checkpoint path) or may be
passed directly as contestant objects. Paired seeding runs every seed twice
with camps swapped, which makes identical deterministic contestants score
exactly 0.5.
"""

from __future__ import annotations

import math
import multiprocessing as mp
from dataclasses import dataclass

import numpy as np

from moba_arena.actions import Action, HEAD_NAMES, HEAD_SIZES
from moba_arena.config import MatchConfig
from moba_arena.engine import advance, new_match
from moba_arena.env import ego_to_world
from moba_arena.fixedmath import MILLI
from moba_arena.masks import legal_actions, sub_action_mask
from moba_arena.nn.sample import sample_action
from moba_arena.observe import encode_observation
from moba_arena.rewards import RewardSnapshot, compute_reward
from moba_arena.state import GameState


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class MatchRecord:
    task: tuple[str, str]
    contestant_a: str
    contestant_b: str
    seed: int
    a_camp: int
    winner: str                       # A | B | draw
    reward: tuple[float, float]       # episode reward (A, B)
    hurt_per_frame: tuple[float, float]
    duration_frames: int


@dataclass
class MatchStats:
    records: list[MatchRecord]

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def win_rate_a(self) -> float:
        if not self.records:
            raise RegistryError("no matches recorded")
        score = sum(1.0 if r.winner == "A" else 0.5 if r.winner == "draw" else 0.0
                    for r in self.records)
        return score / self.n

    @property
    def win_rate_std(self) -> float:
        p = self.win_rate_a
        return math.sqrt(max(0.0, p * (1.0 - p)) / self.n)

    def mean_reward(self) -> tuple[float, float]:
        a = sum(r.reward[0] for r in self.records) / self.n
        b = sum(r.reward[1] for r in self.records) / self.n
        return a, b

    def mean_hurt_per_frame(self) -> tuple[float, float]:
        a = sum(r.hurt_per_frame[0] for r in self.records) / self.n
        b = sum(r.hurt_per_frame[1] for r in self.records) / self.n
        return a, b


class BtContestant:
    def __init__(self, level: int):
        self.level = level
        self.name = f"bt:{level}"

    def controller(self, hero_id: str, match_seed: int, camp: int):
        from moba_arena.bt import make_bt_controller

        return make_bt_controller(hero_id, self.level)


class PolicyContestant:
    """Checkpointed (or in-memory) policy acting via its own obs encoding."""

    def __init__(self, net, seed: int = 0, name: str = "policy", greedy: bool = False):
        self.net = net
        self.seed = seed
        self.name = name
        self.greedy = greedy

    def controller(self, hero_id: str, match_seed: int, camp: int):
        rng = np.random.default_rng((self.seed, match_seed, camp))
        net = self.net
        greedy = self.greedy

        def act(state: GameState, my_camp: int) -> Action:
            obs = encode_observation(state, my_camp)
            mask = legal_actions(state, my_camp)
            masks = {name: mask.head(name).reshape(1, -1) for name in HEAD_NAMES}
            probs, _value, _mem, _cache = net.forward(obs.reshape(1, -1), masks)
            flat = {k: v[0] for k, v in probs.items()}
            rows = sub_action_mask(state, my_camp)
            if greedy:
                from moba_arena.nn.sample import greedy_action

                action = greedy_action(flat, rows)
            else:
                action, _, _, _ = sample_action(flat, rows, rng)
            return ego_to_world(action, my_camp)

        return act


_CKPT_CACHE: dict[str, object] = {}


def resolve_contestant(spec) -> object:
    if hasattr(spec, "controller"):
        return spec
    if isinstance(spec, str) and spec.startswith("bt:"):
        level = int(spec.split(":", 1)[1])
        return BtContestant(level)
    if isinstance(spec, str):
        import os

        if spec in _CKPT_CACHE:
            return _CKPT_CACHE[spec]
        if not os.path.exists(spec):
            raise RegistryError(f"cannot resolve contestant {spec!r}: "
                                "not a bt:LEVEL spec or checkpoint path")
        from moba_arena.train.checkpoint import load_checkpoint

        net, _meta, _ = load_checkpoint(spec)
        contestant = PolicyContestant(net, name=spec)
        _CKPT_CACHE[spec] = contestant
        return contestant
    raise RegistryError(f"cannot resolve contestant {spec!r}")


def play_match(contestant_a, contestant_b, task: tuple[str, str], seed: int,
               a_camp: int = 0, time_limit_s: int | None = 600) -> MatchRecord:
    """One match; contestant A controls the task's target hero."""
    target_hero, opponent_hero = task
    camp_heroes = [None, None]
    camp_heroes[a_camp] = target_hero
    camp_heroes[1 - a_camp] = opponent_hero
    config = MatchConfig(camp0_hero=camp_heroes[0], camp1_hero=camp_heroes[1],
                         seed=seed, time_limit_s=time_limit_s)
    state = new_match(config)

    controllers = [None, None]
    controllers[a_camp] = contestant_a.controller(camp_heroes[a_camp], seed, a_camp)
    controllers[1 - a_camp] = contestant_b.controller(camp_heroes[1 - a_camp], seed,
                                                      1 - a_camp)

    snapshots = [RewardSnapshot.capture(state, camp) for camp in (0, 1)]
    episode_reward = [0.0, 0.0]
    while state.outcome is None:
        actions = tuple(controllers[camp](state, camp) for camp in (0, 1))
        state, events = advance(state, actions)
        for camp in (0, 1):
            breakdown = compute_reward(snapshots[camp], state, camp, events,
                                       config.rewards, outcome=state.outcome,
                                       acted_button=actions[camp].button)
            episode_reward[camp] += breakdown.total
        snapshots = [RewardSnapshot.capture(state, camp) for camp in (0, 1)]

    outcome = state.outcome
    if outcome.winner == "draw":
        winner = "draw"
    else:
        winning_camp = 0 if outcome.winner == "camp0-win" else 1
        winner = "A" if winning_camp == a_camp else "B"
    frames = max(1, state.frame_no)
    hurt = [state.heroes[camp].hero_damage_milli / MILLI / frames for camp in (0, 1)]
    return MatchRecord(
        task=task,
        contestant_a=getattr(contestant_a, "name", "A"),
        contestant_b=getattr(contestant_b, "name", "B"),
        seed=seed,
        a_camp=a_camp,
        winner=winner,
        reward=(episode_reward[a_camp], episode_reward[1 - a_camp]),
        hurt_per_frame=(hurt[a_camp], hurt[1 - a_camp]),
        duration_frames=state.frame_no,
    )


def _play_match_args(args) -> MatchRecord:
    spec_a, spec_b, task, seed, a_camp, time_limit_s = args
    return play_match(resolve_contestant(spec_a), resolve_contestant(spec_b),
                      task, seed, a_camp, time_limit_s)


def run_matches(contestant_a, contestant_b, task: tuple[str, str], n: int,
                paired_seeds: bool = True, seed: int = 0,
                time_limit_s: int | None = 600, workers: int = 1) -> MatchStats:
    """n matches of A vs B on `task`; paired seeding swaps camps per seed."""
    if n <= 0:
        raise RegistryError(f"n must be positive, got {n}")
    a = resolve_contestant(contestant_a)
    b = resolve_contestant(contestant_b)
    plan = []
    if paired_seeds:
        # Every seed is played from both camps; odd n rounds up to a full pair.
        for i in range((n + 1) // 2):
            match_seed = seed + i * 65537
            plan.append((match_seed, 0))
            plan.append((match_seed, 1))
    else:
        plan = [(seed + i * 65537, 0) for i in range(n)]

    if workers > 1:
        args = [(contestant_a, contestant_b, task, s, camp, time_limit_s)
                for s, camp in plan]
        with mp.get_context("fork").Pool(workers) as pool:
            records = pool.map(_play_match_args, args)
    else:
        records = [play_match(a, b, task, s, camp, time_limit_s)
                   for s, camp in plan]
    return MatchStats(records=records)
