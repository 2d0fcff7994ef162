"""Self-play PPO training: parallel actor workers feeding one learner.

Each iteration broadcasts a copy-on-write parameter snapshot to the worker
processes, collects whole-episode trajectories into the memory pool, then
runs PPO updates sampled from the pool under the consumption-frequency
throttle and the staleness rule.
"""

from __future__ import annotations

import json
import multiprocessing as mp
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from moba_arena.config import MatchConfig
from moba_arena.nn.adam import Adam
from moba_arena.nn.net import PolicyNet
from moba_arena.nn.ppo import TrainingError, ppo_loss
from moba_arena.train.actor import actor_run, make_env
from moba_arena.train.checkpoint import save_checkpoint
from moba_arena.train.pool import MemoryPool


@dataclass
class TrainConfig:
    hero: str = "diaochan"
    opponent: str = "mirror"            # mirror | bt:LEVEL
    total_samples: int = 1_000_000
    workers: int = 2
    steps_per_iteration: int = 1024     # env steps per worker per iteration
    batch_size: int = 1024
    epochs: int = 3
    lr: float = 1e-4
    gamma: float = 0.997
    lam: float = 0.95
    epsilon: float = 0.2
    dual_clip_c: float = 3.0
    dual_clip: bool = True
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    advantage_norm: bool = True
    use_masks: bool = True
    recurrent: bool = False
    hidden: int = 256
    memory: int = 128
    time_limit_s: int = 480
    seed: int = 0
    consumption_cap: float = 8.0
    staleness_versions: int = 4
    pool_capacity: int = 100_000
    eval_every: int = 0                 # iterations; 0 disables periodic eval
    eval_matches: int = 20
    eval_bt_level: int = 1
    eval_time_limit_s: int = 600
    ckpt_dir: str | None = None
    log_path: str | None = None
    # Training-time reward weight overrides (None -> published defaults).
    reward_overrides: dict | None = None


def learner_step(pool: MemoryPool, net: PolicyNet, adam: Adam,
                 rng: np.random.Generator, cfg: TrainConfig,
                 block: bool = True, timeout: float | None = None) -> dict | None:
    """One optimizer update from a pool batch; bumps the parameter version.

    Non-finite gradients skip the update (the incident is reported in the
    returned stats).
    """
    batch = pool.sample_steps(cfg.batch_size, rng, block=block, timeout=timeout)
    if batch is None:
        return None
    if cfg.advantage_norm:
        adv = batch["advantages"]
        batch["advantages"] = (adv - adv.mean()) / (adv.std() + 1e-8)
    try:
        loss, grads, stats = ppo_loss(net, batch, epsilon=cfg.epsilon,
                                      c=cfg.dual_clip_c, dual_clip=cfg.dual_clip,
                                      value_coef=cfg.value_coef,
                                      entropy_coef=cfg.entropy_coef)
    except TrainingError as exc:
        return {"skipped": True, "incident": str(exc)}
    flat_grads = net.grads_flat(grads)
    if not np.isfinite(flat_grads).all():
        return {"skipped": True, "incident": "non-finite gradient"}
    net.set_flat(adam.step(net.flat(), flat_grads))
    net.version += 1
    stats["version"] = net.version
    stats["skipped"] = False
    return stats


def _worker_collect(args: tuple) -> tuple:
    (flat, topology, version, match_payload, opponent, n_steps, seed,
     use_masks, gamma, lam) = args
    net = PolicyNet(**topology)
    net.set_flat(flat)
    net.version = version
    from moba_arena.replay import config_from_dict

    config = config_from_dict(match_payload)
    env, learning_camps = make_env(config, opponent, lenient_illegal=not use_masks)
    trajectories, stats = actor_run(env, net, n_steps, learning_camps, seed=seed,
                                    use_masks=use_masks, gamma=gamma, lam=lam)
    return trajectories, stats


class Trainer:
    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.net = PolicyNet(hidden=cfg.hidden, memory=cfg.memory,
                             recurrent=cfg.recurrent, seed=cfg.seed)
        self.adam = Adam(self.net.flat().size, lr=cfg.lr)
        self.pool = MemoryPool(capacity_steps=cfg.pool_capacity,
                               consumption_cap=cfg.consumption_cap)
        self.rng = np.random.default_rng(cfg.seed + 17)
        self.samples = 0
        self.iteration = 0
        self.history: list[dict] = []
        self._mp_pool = None
        self._log_handle = None
        if cfg.log_path:
            self._log_handle = open(cfg.log_path, "a", encoding="utf-8")

    # -- plumbing -----------------------------------------------------------

    def _match_payload(self) -> dict:
        import dataclasses

        from moba_arena.config import RewardWeights
        from moba_arena.replay import config_to_dict

        rewards = RewardWeights()
        if self.cfg.reward_overrides:
            rewards = dataclasses.replace(rewards, **self.cfg.reward_overrides)
        config = MatchConfig(camp0_hero=self.cfg.hero, camp1_hero=self.cfg.hero,
                             seed=self.cfg.seed, time_limit_s=self.cfg.time_limit_s,
                             rewards=rewards)
        return config_to_dict(config)

    def _workers(self):
        if self._mp_pool is None and self.cfg.workers > 1:
            self._mp_pool = mp.get_context("fork").Pool(self.cfg.workers)
        return self._mp_pool

    def close(self) -> None:
        if self._mp_pool is not None:
            self._mp_pool.close()
            self._mp_pool.join()
            self._mp_pool = None
        if self._log_handle is not None:
            self._log_handle.close()
            self._log_handle = None

    def _log(self, record: dict) -> None:
        self.history.append(record)
        if self._log_handle is not None:
            self._log_handle.write(json.dumps(record) + "\n")
            self._log_handle.flush()

    # -- main loop ----------------------------------------------------------

    def collect(self) -> dict:
        topology = {"obs_dim": self.net.obs_dim, "hidden": self.net.hidden,
                    "memory": self.net.memory, "recurrent": self.net.recurrent}
        payload = self._match_payload()
        flat = self.net.flat()
        args = [(flat, topology, self.net.version, payload, self.cfg.opponent,
                 self.cfg.steps_per_iteration,
                 self.cfg.seed + 100_003 * self.iteration + 997 * w,
                 self.cfg.use_masks, self.cfg.gamma, self.cfg.lam)
                for w in range(self.cfg.workers)]
        workers = self._workers()
        if workers is not None:
            results = workers.map(_worker_collect, args)
        else:
            results = [_worker_collect(a) for a in args]
        new_samples = 0
        episodes = wins0 = wins1 = draws = 0
        for trajectories, stats in results:
            for traj in trajectories:
                self.pool.push(traj)
            new_samples += stats.samples
            episodes += stats.episodes
            wins0 += stats.wins[0]
            wins1 += stats.wins[1]
            draws += stats.draws
        self.samples += new_samples
        return {"new_samples": new_samples, "episodes": episodes,
                "wins0": wins0, "wins1": wins1, "draws": draws}

    def update(self, new_samples: int) -> dict:
        n_updates = max(1, self.cfg.epochs * new_samples // self.cfg.batch_size)
        agg: dict = {"updates": 0, "skipped": 0}
        for _ in range(n_updates):
            stats = learner_step(self.pool, self.net, self.adam, self.rng,
                                 self.cfg, block=False)
            if stats is None:
                break
            if stats.get("skipped"):
                agg["skipped"] += 1
                continue
            agg["updates"] += 1
            for key in ("loss", "policy_loss", "value_loss", "entropy"):
                if key in stats:
                    agg[key] = agg.get(key, 0.0) + stats[key]
        for key in ("loss", "policy_loss", "value_loss", "entropy"):
            if key in agg and agg["updates"]:
                agg[key] /= agg["updates"]
        self.pool.evict_stale(self.net.version - self.cfg.staleness_versions)
        return agg

    def evaluate(self, n_matches: int | None = None, seed: int = 1234) -> float:
        from moba_arena.evalarena.matches import PolicyContestant, run_matches

        contestant = PolicyContestant(self.net, seed=seed)
        stats = run_matches(contestant, f"bt:{self.cfg.eval_bt_level}",
                            task=(self.cfg.hero, self.cfg.hero),
                            n=n_matches or self.cfg.eval_matches,
                            paired_seeds=True, seed=seed,
                            time_limit_s=self.cfg.eval_time_limit_s,
                            workers=2)
        return stats.win_rate_a

    def run(self, win_rate_target: float | None = None,
            patience_evals: int = 2) -> PolicyNet:
        start = time.time()
        hits = 0
        while self.samples < self.cfg.total_samples:
            self.iteration += 1
            collected = self.collect()
            update_stats = self.update(collected["new_samples"])
            record = {
                "iteration": self.iteration,
                "wall_clock_s": round(time.time() - start, 1),
                "samples": self.samples,
                "consumption_freq": round(self.pool.consumption_frequency(), 3),
                **{k: round(v, 5) if isinstance(v, float) else v
                   for k, v in update_stats.items()},
                **collected,
            }
            if self.cfg.eval_every and self.iteration % self.cfg.eval_every == 0:
                record["eval_win_rate"] = self.evaluate()
                if win_rate_target is not None:
                    hits = hits + 1 if record["eval_win_rate"] >= win_rate_target else 0
            self._log(record)
            if self.cfg.ckpt_dir and self.cfg.eval_every \
                    and self.iteration % (self.cfg.eval_every * 4) == 0:
                os.makedirs(self.cfg.ckpt_dir, exist_ok=True)
                save_checkpoint(os.path.join(self.cfg.ckpt_dir,
                                             f"iter{self.iteration:05d}.npz"),
                                self.net, meta={"samples": self.samples,
                                                "config": asdict(self.cfg)},
                                adam=self.adam)
            if win_rate_target is not None and hits >= patience_evals:
                break
        if self.cfg.ckpt_dir:
            os.makedirs(self.cfg.ckpt_dir, exist_ok=True)
            save_checkpoint(os.path.join(self.cfg.ckpt_dir, "final.npz"), self.net,
                            meta={"samples": self.samples, "config": asdict(self.cfg)},
                            adam=self.adam)
        return self.net
