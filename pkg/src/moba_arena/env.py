"""The RL-facing environment: reset/step quadruple over the engine.

Both reset() and step() return (obs, reward, done, info), each a list with
one entry per agent (always 2). Action offsets arrive in each agent's ego
frame and are mirrored into world coordinates for camp 1, so a single policy
plays either side; scripted opponents act directly in world coordinates.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from moba_arena.actions import Action
from moba_arena.config import MatchConfig
from moba_arena.engine import ContractError, advance, new_match, terminal
from moba_arena.fixedmath import mirror_direction_index
from moba_arena.masks import legal_actions, sub_action_mask
from moba_arena.observe import encode_observation
from moba_arena.rewards import RewardSnapshot, compute_reward
from moba_arena.state import GameState

NUM_AGENTS = 2

# An opponent controller maps (state, camp) -> world-frame Action.
Controller = Callable[[GameState, int], Action]

INFO_KEYS = ("observation", "legal_action", "sub_action_mask", "done",
             "frame_no", "reward", "game_id", "player_id", "raw_state")


def ego_to_world(action: Action, camp: int) -> Action:
    """Mirror x-axis offsets for camp 1 (ego frame faces the enemy base)."""
    if camp == 0:
        return action
    return Action(
        button=action.button,
        move_x=mirror_direction_index(action.move_x),
        move_z=action.move_z,
        skill_x=mirror_direction_index(action.skill_x),
        skill_z=action.skill_z,
        target=action.target,
    )


class Arena1v1Env:
    """One match per episode; num_agents is always 2."""

    num_agents = NUM_AGENTS

    def __init__(self, config: MatchConfig,
                 controllers: dict[int, Controller] | None = None,
                 include_raw_state: bool = True,
                 lenient_illegal: bool = False):
        self.config = config
        self.controllers = controllers or {}
        self.include_raw_state = include_raw_state
        # Lenient mode (for no-mask ablations): an illegal submission becomes
        # a no-op instead of an error, like ignoring an invalid command.
        self.lenient_illegal = lenient_illegal
        self.state: GameState | None = None
        self.episode = 0
        self._done = True
        self._snapshots: list[RewardSnapshot] | None = None

    # -- episode control --------------------------------------------------

    def reset(self, seed: int | None = None):
        if seed is not None:
            from dataclasses import replace

            self.config = replace(self.config, seed=seed)
        self.state = new_match(self.config)
        self.state.game_id = f"{self.state.game_id}-e{self.episode}"
        self.episode += 1
        self._done = False
        self._snapshots = [RewardSnapshot.capture(self.state, camp)
                           for camp in range(NUM_AGENTS)]
        obs = [encode_observation(self.state, camp) for camp in range(NUM_AGENTS)]
        rewards = [0.0, 0.0]
        dones = [False, False]
        infos = [self._info(camp, obs[camp], 0.0, False) for camp in range(NUM_AGENTS)]
        return obs, rewards, dones, infos

    def step(self, actions: Sequence):
        if self.state is None:
            raise ContractError("step before reset")
        if self._done:
            raise ContractError("step after episode done")
        if len(actions) != NUM_AGENTS:
            raise ContractError(f"expected {NUM_AGENTS} actions, got {len(actions)}")

        world_actions = []
        for camp in range(NUM_AGENTS):
            controller = self.controllers.get(camp)
            if controller is not None:
                world_actions.append(controller(self.state, camp))
            else:
                action = actions[camp]
                if not isinstance(action, Action):
                    action = Action.from_list(action)
                world = ego_to_world(action, camp)
                if self.lenient_illegal:
                    from moba_arena.engine import IllegalActionError, validate_action

                    try:
                        validate_action(self.state, camp, world)
                    except IllegalActionError:
                        world = Action()
                world_actions.append(world)

        prev = self._snapshots
        self.state, events = advance(self.state, tuple(world_actions))
        outcome = self.state.outcome
        self._done = outcome is not None
        self._snapshots = [RewardSnapshot.capture(self.state, camp)
                           for camp in range(NUM_AGENTS)]

        obs = [encode_observation(self.state, camp) for camp in range(NUM_AGENTS)]
        rewards = []
        for camp in range(NUM_AGENTS):
            breakdown = compute_reward(prev[camp], self.state, camp, events,
                                       self.config.rewards, outcome=outcome,
                                       acted_button=world_actions[camp].button)
            rewards.append(breakdown.total)
        dones = [self._done, self._done]
        infos = [self._info(camp, obs[camp], rewards[camp], self._done)
                 for camp in range(NUM_AGENTS)]
        return obs, rewards, dones, infos

    # -- helpers -----------------------------------------------------------

    def _info(self, camp: int, obs: np.ndarray, reward: float, done: bool) -> dict:
        state = self.state
        return {
            "observation": obs,
            "legal_action": legal_actions(state, camp).flatten(),
            "sub_action_mask": sub_action_mask(state, camp),
            "done": 1 if done else 0,
            "frame_no": state.frame_no,
            "reward": reward,
            "game_id": state.game_id,
            "player_id": f"player_{camp}",
            "raw_state": state.serialize() if self.include_raw_state else "",
        }

    @property
    def done(self) -> bool:
        return self._done

    def outcome(self):
        return terminal(self.state) if self.state is not None else None

    def close(self) -> None:
        self.state = None
        self._done = True
