import threading
import time

import numpy as np
import pytest

from moba_arena.actions import HEAD_NAMES, HEAD_SIZES
from moba_arena.config import MatchConfig
from moba_arena.nn.adam import Adam
from moba_arena.nn.net import PolicyNet
from moba_arena.train.actor import actor_run, make_env
from moba_arena.train.learner import TrainConfig, learner_step
from moba_arena.train.pool import MemoryPool
from moba_arena.train.trajectory import Trajectory


def toy_trajectory(steps=10, version=0, seed=0):
    rng = np.random.default_rng(seed)
    masks = {name: np.ones((steps, size), dtype=np.int8)
             for name, size in zip(HEAD_NAMES, HEAD_SIZES)}
    dones = np.zeros(steps, dtype=np.int8)
    dones[-1] = 1
    traj = Trajectory(
        obs=rng.normal(size=(steps, 385)).astype(np.float32),
        masks=masks,
        actions=np.zeros((steps, 6), dtype=np.int16),
        logps=np.full((steps, 6), -1.0),
        consumed=np.ones((steps, 6), dtype=np.int8),
        values=rng.normal(size=steps),
        rewards=rng.normal(size=steps),
        dones=dones,
        memories=np.zeros((steps, 128), dtype=np.float32),
        version=version,
    )
    traj.compute_gae()
    return traj


def test_trajectory_invariants():
    with pytest.raises(ValueError, match="final step"):
        bad = toy_trajectory(5)
        dones = bad.dones.copy()
        dones[1] = 1
        Trajectory(obs=bad.obs, masks=bad.masks, actions=bad.actions,
                   logps=bad.logps, consumed=bad.consumed, values=bad.values,
                   rewards=bad.rewards, dones=dones, memories=bad.memories,
                   version=0)
    with pytest.raises(ValueError, match="log-prob"):
        bad = toy_trajectory(5)
        logps = bad.logps.copy()
        logps[0, 0] = np.inf
        Trajectory(obs=bad.obs, masks=bad.masks, actions=bad.actions,
                   logps=logps, consumed=bad.consumed, values=bad.values,
                   rewards=bad.rewards, dones=bad.dones, memories=bad.memories,
                   version=0)


def test_pool_accounting():
    pool = MemoryPool(capacity_steps=1000, consumption_cap=None)
    pool.push(toy_trajectory(40))
    pool.push(toy_trajectory(60))
    assert pool.produced == 100 and pool.size_steps == 100
    rng = np.random.default_rng(0)
    batch = pool.sample_steps(32, rng)
    assert len(batch["obs"]) == 32
    assert pool.consumed == 32
    assert abs(pool.consumption_frequency() - 0.32) < 1e-12


def test_pool_capacity_bound():
    pool = MemoryPool(capacity_steps=100, consumption_cap=None)
    for i in range(10):
        pool.push(toy_trajectory(40, seed=i))
    assert pool.size_steps <= 100
    assert pool.produced == 400


def test_pool_staleness_eviction():
    pool = MemoryPool(capacity_steps=1000, consumption_cap=None)
    for version in range(6):
        pool.push(toy_trajectory(10, version=version))
    dropped = pool.evict_stale(min_version=3)
    assert dropped == 3
    assert pool.size_steps == 30


def test_consumption_throttle_blocks_and_releases():
    pool = MemoryPool(capacity_steps=1000, consumption_cap=2.0)
    pool.push(toy_trajectory(10))
    rng = np.random.default_rng(1)
    assert pool.sample_steps(10, rng) is not None      # freq -> 1.0
    assert pool.sample_steps(10, rng) is not None      # freq -> 2.0 (at cap)
    # Next batch would exceed the cap: non-blocking returns None.
    assert pool.sample_steps(10, rng, block=False) is None

    release = threading.Event()

    def producer():
        release.wait()
        pool.push(toy_trajectory(10))

    thread = threading.Thread(target=producer)
    thread.start()
    release.set()
    batch = pool.sample_steps(10, rng, block=True, timeout=5.0)
    thread.join()
    assert batch is not None
    assert pool.consumption_frequency() <= 2.0


def test_actor_mirror_accounting(mirror_config):
    cfg = MatchConfig(camp0_hero="diaochan", camp1_hero="diaochan", seed=3,
                      time_limit_s=20)
    env, camps = make_env(cfg, "mirror")
    net = PolicyNet(seed=0)
    pool = MemoryPool(consumption_cap=None)
    trajectories, stats = actor_run(env, net, n_steps=100, learning_camps=camps,
                                    seed=1, pool=pool)
    # One 20s episode = 150 decision steps, two trajectories (one per camp).
    assert stats.episodes >= 1
    assert len(trajectories) == 2 * stats.episodes
    assert stats.samples == 2 * stats.steps
    assert pool.produced == stats.samples


def test_actor_vs_bt_single_trajectory():
    cfg = MatchConfig(camp0_hero="diaochan", camp1_hero="diaochan", seed=3,
                      time_limit_s=20)
    env, camps = make_env(cfg, "bt:1")
    assert camps == [0]
    net = PolicyNet(seed=0)
    trajectories, stats = actor_run(env, net, n_steps=100, learning_camps=camps,
                                    seed=1, max_episodes=1)
    assert len(trajectories) == 1
    assert stats.samples == stats.steps


def test_snapshot_consistency():
    """Stored per-head log-probs re-evaluate exactly under the same params.

    Re-evaluation uses the recording shape (one row per forward): BLAS
    reductions are only bitwise-reproducible for identical shapes.
    """
    cfg = MatchConfig(camp0_hero="diaochan", camp1_hero="diaochan", seed=5,
                      time_limit_s=10)
    env, camps = make_env(cfg, "mirror")
    net = PolicyNet(seed=4)
    trajectories, _ = actor_run(env, net, n_steps=40, learning_camps=camps, seed=2)
    traj = trajectories[0]
    for t in range(len(traj)):
        masks = {n: traj.masks[n][t].reshape(1, -1) for n in HEAD_NAMES}
        probs, _, _, _ = net.forward(traj.obs[t].reshape(1, -1), masks)
        for hi, name in enumerate(HEAD_NAMES):
            if not traj.consumed[t, hi]:
                continue
            recomputed = float(np.log(probs[name][0, traj.actions[t, hi]]))
            assert recomputed == traj.logps[t, hi]


def test_learner_step_overfits_one_batch():
    pool = MemoryPool(consumption_cap=None)
    pool.push(toy_trajectory(64, seed=9))
    net = PolicyNet(seed=1)
    adam = Adam(net.flat().size, lr=1e-3)
    cfg = TrainConfig(batch_size=64, advantage_norm=True)
    # A fresh identically-seeded rng per step replays the exact same batch.
    losses = []
    for _ in range(6):
        stats = learner_step(pool, net, adam, np.random.default_rng(0), cfg)
        assert stats and not stats.get("skipped")
        losses.append(stats["loss"])
    assert losses[-1] < losses[0]
    assert net.version == 6
