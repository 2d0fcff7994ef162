"""Q-learning baseline loss over the button head, with legal-action max."""

from __future__ import annotations

import numpy as np

from moba_arena.nn.net import NEG_INF, QNet
from moba_arena.nn.ppo import TrainingError


def dqn_loss(qnet: QNet, target_qnet: QNet, batch: dict, gamma: float = 0.98,
             compute_grads: bool = True):
    """TD target r + gamma * max over LEGAL next actions of the target network.

    Batch keys: obs [N,D], actions [N], rewards [N], next_obs [N,D],
    next_legal [N,A] (0/1), dones [N].
    """
    obs = np.asarray(batch["obs"], dtype=np.float64)
    actions = np.asarray(batch["actions"], dtype=np.int64)
    rewards = np.asarray(batch["rewards"], dtype=np.float64)
    dones = np.asarray(batch["dones"], dtype=np.float64)
    next_legal = np.asarray(batch["next_legal"], dtype=bool)
    if not np.isfinite(rewards).all():
        bad = int(np.flatnonzero(~np.isfinite(rewards))[0])
        raise TrainingError(f"non-finite reward at batch index {bad}")
    n = len(obs)

    q, cache = qnet.forward(obs)
    q_taken = q[np.arange(n), actions]

    q_next, _ = target_qnet.forward(np.asarray(batch["next_obs"], dtype=np.float64))
    q_next = np.where(next_legal, q_next, NEG_INF)
    best_next = q_next.max(axis=1)
    target = rewards + gamma * (1.0 - dones) * best_next
    err = q_taken - target
    loss = float((err ** 2).mean())
    if not compute_grads:
        return loss, None, {"loss": loss}

    dq = np.zeros_like(q)
    dq[np.arange(n), actions] = 2.0 * err / n
    grads = qnet.zero_grads()
    qnet.backward(cache, dq, grads)
    return loss, grads, {"loss": loss, "target_mean": float(target.mean())}
