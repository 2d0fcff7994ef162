"""Generalized advantage estimation over one trajectory."""

from __future__ import annotations

import numpy as np


def gae(rewards, values, dones, bootstrap_value: float = 0.0,
        gamma: float = 0.997, lam: float = 0.95):
    """Backward recursion: delta_t = r_t + gamma*V_{t+1}*(1-done_t) - V_t,
    A_t = delta_t + gamma*lam*(1-done_t)*A_{t+1}; returns (advantages, returns).

    `values` has length T (one per step); `bootstrap_value` stands in for
    V_{T} on non-terminal tails.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    steps = len(rewards)
    if steps == 0:
        raise ValueError("gae requires a non-empty trajectory")
    if not (len(values) == len(dones) == steps):
        raise ValueError("rewards/values/dones must have equal length")

    advantages = np.zeros(steps, dtype=np.float64)
    next_value = float(bootstrap_value)
    next_advantage = 0.0
    for t in range(steps - 1, -1, -1):
        alive = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * alive - values[t]
        next_advantage = delta + gamma * lam * alive * next_advantage
        advantages[t] = next_advantage
        next_value = values[t]
    returns = advantages + values
    return advantages, returns
