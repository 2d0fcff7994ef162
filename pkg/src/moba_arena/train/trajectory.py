"""Trajectories (one per camp per episode) and flat sample batches."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from moba_arena.actions import HEAD_NAMES
from moba_arena.nn.gae import gae


@dataclass
class Trajectory:
    obs: np.ndarray                 # [T, D] float32
    masks: dict                     # head -> [T, n] int8
    actions: np.ndarray             # [T, 6] int16
    logps: np.ndarray               # [T, 6] float64, per head (0 if not consumed)
    consumed: np.ndarray            # [T, 6] int8
    values: np.ndarray              # [T] float64
    rewards: np.ndarray             # [T] float64
    dones: np.ndarray               # [T] int8
    memories: np.ndarray            # [T, M] float32 (memory cell entering each step)
    version: int
    bootstrap_value: float = 0.0
    advantages: np.ndarray = field(default=None)
    returns: np.ndarray = field(default=None)

    def __post_init__(self):
        steps = len(self.obs)
        if steps == 0:
            raise ValueError("empty trajectory")
        if not np.isfinite(self.logps).all():
            raise ValueError("non-finite log-probabilities in trajectory")
        done_idx = np.flatnonzero(self.dones)
        if len(done_idx) > 1 or (len(done_idx) == 1 and done_idx[0] != steps - 1):
            raise ValueError("done may appear only at the final step")

    def __len__(self) -> int:
        return len(self.obs)

    @property
    def joint_logp(self) -> np.ndarray:
        return (self.logps * self.consumed).sum(axis=1)

    def compute_gae(self, gamma: float = 0.997, lam: float = 0.95) -> None:
        self.advantages, self.returns = gae(self.rewards, self.values, self.dones,
                                            self.bootstrap_value, gamma, lam)


def build_batch(samples: list[tuple[Trajectory, int]]) -> dict:
    """Assemble a flat PPO batch from (trajectory, step) picks."""
    if not samples:
        raise ValueError("empty batch")
    obs = np.stack([traj.obs[t] for traj, t in samples])
    masks = {name: np.stack([traj.masks[name][t] for traj, t in samples])
             for name in HEAD_NAMES}
    batch = {
        "obs": obs,
        "masks": masks,
        "actions": np.stack([traj.actions[t] for traj, t in samples]).astype(np.int64),
        "consumed": np.stack([traj.consumed[t] for traj, t in samples]).astype(np.float64),
        "old_logp": np.array([traj.joint_logp[t] for traj, t in samples]),
        "advantages": np.array([traj.advantages[t] for traj, t in samples]),
        "returns": np.array([traj.returns[t] for traj, t in samples]),
        "mem_in": np.stack([traj.memories[t] for traj, t in samples]).astype(np.float64),
    }
    return batch
