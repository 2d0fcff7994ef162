"""Throughput benchmark: concurrent envs running random masked rollouts."""

from __future__ import annotations

import multiprocessing as mp
import time

from moba_arena.config import MatchConfig
from moba_arena.env import Arena1v1Env
from moba_arena.train.actor import RandomMaskedAgent


def _bench_worker(args: tuple) -> int:
    seed, duration_s, time_limit_s = args
    config = MatchConfig(seed=seed, time_limit_s=time_limit_s)
    env = Arena1v1Env(config, include_raw_state=False)
    agent = RandomMaskedAgent(seed=seed)
    steps = 0
    deadline = time.time() + duration_s
    obs, _, _, infos = env.reset()
    while time.time() < deadline:
        actions = [agent.act(infos[c]["legal_action"], infos[c]["sub_action_mask"])
                   for c in range(2)]
        obs, _, dones, infos = env.step(actions)
        steps += 1
        if dones[0]:
            obs, _, _, infos = env.reset(seed=seed + steps)
    return steps


def bench_throughput(n_envs: int, duration_s: float, seed: int = 0,
                     time_limit_s: int = 300) -> dict:
    """Aggregate env steps/hour across n_envs concurrent processes."""
    if n_envs < 1:
        raise ValueError(f"n_envs must be >= 1, got {n_envs}")
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    args = [(seed + 31 * i, duration_s, time_limit_s) for i in range(n_envs)]
    if n_envs == 1:
        totals = [_bench_worker(args[0])]
    else:
        with mp.get_context("fork").Pool(n_envs) as pool:
            totals = pool.map(_bench_worker, args)
    steps = sum(totals)
    return {
        "n_envs": n_envs,
        "duration_s": duration_s,
        "steps": steps,
        "steps_per_hour": steps / duration_s * 3600.0,
        "samples_per_hour": 2 * steps / duration_s * 3600.0,
    }


def scaling_curve(env_counts: list[int], duration_s: float, seed: int = 0) -> list[dict]:
    """Figure-style scaling table over concurrent env counts."""
    return [bench_throughput(n, duration_s, seed=seed) for n in env_counts]
