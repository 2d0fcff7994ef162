import numpy as np
import pytest

from conftest import rollout_random, sample_legal_action

from moba_arena.actions import (Action, BTN_ATTACK, BTN_HEAL, BTN_MOVE,
                                BTN_NONE, BTN_SKILL1)
from moba_arena.config import MatchConfig
from moba_arena.engine import IllegalActionError, advance, new_match, validate_action
from moba_arena.masks import legal_actions, sub_action_mask


def test_none_always_legal(mirror_config):
    state = rollout_random(mirror_config, 50, rng_seed=1)
    for camp in (0, 1):
        assert legal_actions(state, camp).button[BTN_NONE] == 1


def test_every_head_has_a_legal_entry(mirror_config):
    state = rollout_random(mirror_config, 80, rng_seed=2)
    for camp in (0, 1):
        mask = legal_actions(state, camp)
        for name in ("button", "move_x", "move_z", "skill_x", "skill_z", "target"):
            assert mask.head(name).sum() >= 1


def test_skill_on_cooldown_masked(mirror_config):
    state = new_match(mirror_config)
    state.heroes[0].skill_cd[0] = 30
    assert legal_actions(state, 0).button[BTN_SKILL1] == 0


def test_insufficient_mp_masks_skill(mirror_config):
    state = new_match(mirror_config)
    state.heroes[0].mp = 0
    assert legal_actions(state, 0).button[BTN_SKILL1] == 0


def test_stunned_hero_only_none(mirror_config):
    state = new_match(mirror_config)
    state.heroes[0].stun_left = 10
    mask = legal_actions(state, 0)
    assert mask.button[BTN_NONE] == 1
    assert mask.button.sum() == 1


def test_dead_hero_only_none(mirror_config):
    state = new_match(mirror_config)
    state.heroes[0].alive = False
    state.heroes[0].respawn_left = 100
    mask = legal_actions(state, 0)
    assert mask.button.sum() == 1


def test_skill4_masked_for_heroes_without_it():
    state = new_match(MatchConfig(camp0_hero="diaochan", camp1_hero="luna", seed=1))
    assert legal_actions(state, 0).button[9] == 0     # diaochan: 3 skills
    assert legal_actions(state, 1).button[9] == 1     # luna has skill 4


def test_equipment_masked_without_active_item(mirror_config):
    state = new_match(mirror_config)
    assert legal_actions(state, 0).button[10] == 0


def test_target_entries_for_dead_units(mirror_config):
    state = new_match(mirror_config)
    mask = legal_actions(state, 0)
    assert mask.target[0] == 1 and mask.target[1] == 1
    assert mask.target[2] == 1                         # enemy alive
    assert mask.target[3:7].sum() == 0                 # no creeps yet
    state.heroes[1].alive = False
    assert legal_actions(state, 0).target[2] == 0


def test_sub_action_rows(mirror_config):
    state = new_match(mirror_config)
    rows = sub_action_mask(state, 0)
    assert rows[BTN_NONE].sum() == 0
    assert rows[BTN_MOVE].tolist() == [1, 1, 0, 0, 0]
    assert rows[BTN_ATTACK].tolist() == [0, 0, 0, 0, 1]
    assert rows[BTN_HEAL].sum() == 0


def test_mask_soundness_random_sampling(mirror_config):
    """Masked samples are always accepted by the engine."""
    rng = np.random.default_rng(11)
    state = new_match(mirror_config)
    for _ in range(400):
        if state.outcome is not None:
            state = new_match(mirror_config)
        actions = (sample_legal_action(state, 0, rng),
                   sample_legal_action(state, 1, rng))
        state, _ = advance(state, actions)     # would raise on a rejection


def test_mask_necessity_forced_illegal_buttons(mirror_config):
    state = rollout_random(mirror_config, 60, rng_seed=3)
    for camp in (0, 1):
        mask = legal_actions(state, camp)
        for button in np.flatnonzero(mask.button == 0):
            with pytest.raises(IllegalActionError):
                validate_action(state, camp, Action(button=int(button)))


def test_forced_illegal_target_rejected(mirror_config):
    state = new_match(mirror_config)           # no creeps at frame 0
    bad = Action(button=BTN_ATTACK, target=4)
    with pytest.raises(IllegalActionError):
        validate_action(state, 0, bad)


def test_out_of_range_button_rejected(mirror_config):
    state = new_match(mirror_config)
    with pytest.raises(IllegalActionError):
        validate_action(state, 0, Action(button=11))
