"""Action sampling from masked head distributions."""

from __future__ import annotations

import numpy as np

from moba_arena.actions import Action, HEAD_NAMES, SUB_HEADS


def _draw(p: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(p)
    return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right").clip(0, len(p) - 1))


def sample_action(probs: dict[str, np.ndarray], sub_rows: np.ndarray,
                  rng: np.random.Generator):
    """Hierarchical sample: button first, then the heads it consumes.

    Heads the button does not consume are forced to index 0 and excluded
    from the joint log-probability. Returns (action, joint_logp,
    per_head_logp[6], consumed[6]).
    """
    flat = {name: np.asarray(probs[name]).reshape(-1) for name in HEAD_NAMES}
    button = _draw(flat["button"], rng)
    row = sub_rows[button]

    indices = {"button": button}
    consumed = np.zeros(6)
    consumed[0] = 1.0
    per_head_logp = np.zeros(6)
    per_head_logp[0] = float(np.log(max(flat["button"][button], 1e-300)))
    for si, name in enumerate(SUB_HEADS):
        hi = si + 1
        if row[si]:
            idx = _draw(flat[name], rng)
            indices[name] = idx
            consumed[hi] = 1.0
            per_head_logp[hi] = float(np.log(max(flat[name][idx], 1e-300)))
        else:
            indices[name] = 0
    action = Action(button=indices["button"], move_x=indices["move_x"],
                    move_z=indices["move_z"], skill_x=indices["skill_x"],
                    skill_z=indices["skill_z"], target=indices["target"])
    return action, float(per_head_logp.sum()), per_head_logp, consumed


def greedy_action(probs: dict[str, np.ndarray], sub_rows: np.ndarray) -> Action:
    flat = {name: np.asarray(probs[name]).reshape(-1) for name in HEAD_NAMES}
    button = int(np.argmax(flat["button"]))
    row = sub_rows[button]
    indices = {"button": button}
    for si, name in enumerate(SUB_HEADS):
        indices[name] = int(np.argmax(flat[name])) if row[si] else 0
    return Action(**indices)
