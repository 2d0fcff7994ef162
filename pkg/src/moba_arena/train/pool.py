"""Bounded trajectory pool with production/consumption accounting.

Many producers, single consumer. The consumption-frequency throttle blocks
the learner whenever consuming another batch would push
consumed/produced above the configured cap; producers pushing new samples
release it.
"""

from __future__ import annotations

import threading
from collections import deque

import numpy as np

from moba_arena.train.trajectory import Trajectory, build_batch


class MemoryPool:
    def __init__(self, capacity_steps: int = 200_000,
                 consumption_cap: float | None = 8.0):
        self.capacity_steps = capacity_steps
        self.consumption_cap = consumption_cap
        self._trajectories: deque[Trajectory] = deque()
        self._steps = 0
        self._produced = 0
        self._consumed = 0
        self._cond = threading.Condition()

    # -- producer side ---------------------------------------------------

    def push(self, trajectory: Trajectory) -> None:
        with self._cond:
            self._trajectories.append(trajectory)
            self._steps += len(trajectory)
            self._produced += len(trajectory)
            while self._steps > self.capacity_steps and len(self._trajectories) > 1:
                dropped = self._trajectories.popleft()
                self._steps -= len(dropped)
            self._cond.notify_all()

    # -- consumer side -----------------------------------------------------

    def sample_steps(self, batch_size: int, rng: np.random.Generator,
                     block: bool = True, timeout: float | None = None) -> dict | None:
        """Uniform step sample across stored trajectories; counts consumption.

        Blocks while the consumption cap would be exceeded (or the pool is
        empty); returns None on timeout.
        """
        with self._cond:
            def ready() -> bool:
                if self._steps == 0:
                    return False
                if self.consumption_cap is None:
                    return True
                return (self._consumed + batch_size) / max(1, self._produced) \
                    <= self.consumption_cap

            if not ready():
                if not block:
                    return None
                if not self._cond.wait_for(ready, timeout=timeout):
                    return None
            trajs = list(self._trajectories)
            self._consumed += batch_size

        lengths = np.array([len(t) for t in trajs])
        cumulative = np.cumsum(lengths)
        picks = rng.integers(0, cumulative[-1], size=batch_size)
        samples = []
        for pick in picks:
            idx = int(np.searchsorted(cumulative, pick, side="right"))
            offset = pick - (cumulative[idx - 1] if idx else 0)
            samples.append((trajs[idx], int(offset)))
        return build_batch(samples)

    def drain(self) -> list[Trajectory]:
        with self._cond:
            trajs = list(self._trajectories)
            self._trajectories.clear()
            self._steps = 0
            return trajs

    def evict_stale(self, min_version: int) -> int:
        """Drop trajectories generated before `min_version`; returns count."""
        with self._cond:
            kept = deque()
            dropped = 0
            for traj in self._trajectories:
                if traj.version >= min_version:
                    kept.append(traj)
                else:
                    dropped += 1
                    self._steps -= len(traj)
            self._trajectories = kept
            return dropped

    # -- accounting --------------------------------------------------------

    @property
    def produced(self) -> int:
        return self._produced

    @property
    def consumed(self) -> int:
        return self._consumed

    @property
    def size_steps(self) -> int:
        return self._steps

    def consumption_frequency(self) -> float:
        return self._consumed / max(1, self._produced)
