import numpy as np

from moba_arena.actions import BTN_MOVE, HEAD_NAMES, HEAD_SIZES
from moba_arena.nn.sample import greedy_action, sample_action

SUB_ROWS = np.zeros((11, 5), dtype=np.int8)
SUB_ROWS[BTN_MOVE, 0] = 1
SUB_ROWS[BTN_MOVE, 1] = 1
SUB_ROWS[2, 4] = 1     # attack consumes target
SUB_ROWS[3, 2] = 1     # skill1 consumes skill offsets
SUB_ROWS[3, 3] = 1


def uniform_probs():
    return {name: np.full(size, 1.0 / size)
            for name, size in zip(HEAD_NAMES, HEAD_SIZES)}


def test_onehot_distribution_gives_logp_zero():
    probs = uniform_probs()
    for name, size in zip(HEAD_NAMES, HEAD_SIZES):
        probs[name] = np.zeros(size)
    probs["button"][0] = 1.0
    for name in HEAD_NAMES[1:]:
        probs[name][0] = 1.0
    action, logp, per_head, consumed = sample_action(probs, SUB_ROWS,
                                                     np.random.default_rng(0))
    assert action.button == 0
    assert logp == 0.0
    assert consumed.tolist() == [1, 0, 0, 0, 0, 0]


def test_move_button_excludes_skill_heads():
    probs = uniform_probs()
    probs["button"] = np.zeros(11)
    probs["button"][BTN_MOVE] = 1.0
    action, logp, per_head, consumed = sample_action(probs, SUB_ROWS,
                                                     np.random.default_rng(1))
    assert action.button == BTN_MOVE
    assert consumed.tolist() == [1, 1, 1, 0, 0, 0]
    assert per_head[3] == 0.0 and per_head[4] == 0.0 and per_head[5] == 0.0
    assert action.skill_x == 0 and action.skill_z == 0 and action.target == 0
    # joint logp: button is certain, the two move heads are 1/16 each
    assert abs(logp - 2 * np.log(1 / 16)) < 1e-12


def test_empirical_frequencies_within_3_sigma():
    rng = np.random.default_rng(42)
    probs = uniform_probs()
    weights = np.arange(1.0, 12.0)
    probs["button"] = weights / weights.sum()
    n = 100_000
    counts = np.zeros(11)
    for _ in range(n):
        action, _, _, _ = sample_action(probs, SUB_ROWS, rng)
        counts[action.button] += 1
    for k in range(11):
        p = probs["button"][k]
        sigma = np.sqrt(n * p * (1 - p))
        assert abs(counts[k] - n * p) <= 3 * sigma


def test_zero_probability_entries_never_sampled():
    rng = np.random.default_rng(7)
    probs = uniform_probs()
    probs["button"] = np.array([0.5, 0.0, 0.5] + [0.0] * 8)
    for _ in range(2000):
        action, _, _, _ = sample_action(probs, SUB_ROWS, rng)
        assert action.button in (0, 2)


def test_greedy_action_picks_argmax():
    probs = uniform_probs()
    probs["button"] = np.zeros(11)
    probs["button"][3] = 1.0
    probs["skill_x"] = np.zeros(16)
    probs["skill_x"][9] = 1.0
    action = greedy_action(probs, SUB_ROWS)
    assert action.button == 3 and action.skill_x == 9 and action.target == 0
