import numpy as np
import pytest

from moba_arena.actions import Action, HEAD_NAMES, HEAD_SIZES
from moba_arena.config import MatchConfig
from moba_arena.engine import advance, new_match
from moba_arena.masks import LegalMask, legal_actions, sub_action_mask


@pytest.fixture
def mirror_config():
    return MatchConfig(camp0_hero="diaochan", camp1_hero="diaochan", seed=7,
                       time_limit_s=300)


@pytest.fixture
def mixed_config():
    return MatchConfig(camp0_hero="diaochan", camp1_hero="peiqinhu", seed=7,
                       time_limit_s=300)


def sample_legal_action(state, camp, rng: np.random.Generator) -> Action:
    """Uniform random action over the legal mask (button-first hierarchy)."""
    mask = legal_actions(state, camp)
    rows = sub_action_mask(state, camp)
    button = int(rng.choice(np.flatnonzero(mask.button)))
    indices = {"button": button}
    for si, name in enumerate(("move_x", "move_z", "skill_x", "skill_z", "target")):
        if rows[button][si]:
            indices[name] = int(rng.choice(np.flatnonzero(mask.head(name))))
        else:
            indices[name] = 0
    return Action(**indices)


def rollout_random(config: MatchConfig, n_steps: int, rng_seed: int = 0):
    """Advance a fresh match under random masked actions; returns final state."""
    rng = np.random.default_rng(rng_seed)
    state = new_match(config)
    for _ in range(n_steps):
        if state.outcome is not None:
            break
        actions = (sample_legal_action(state, 0, rng),
                   sample_legal_action(state, 1, rng))
        state, _ = advance(state, actions)
    return state
