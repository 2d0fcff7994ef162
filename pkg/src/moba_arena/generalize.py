"""Generalization protocols: direct transfer, multi-task training, distillation."""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass, field, replace

import numpy as np

from moba_arena.actions import HEAD_NAMES
from moba_arena.config import ConfigurationError, MatchConfig
from moba_arena.heroes import hero_ids
from moba_arena.nn.adam import Adam
from moba_arena.nn.distill import distill_loss
from moba_arena.nn.net import PolicyNet
from moba_arena.train.actor import actor_run, make_env
from moba_arena.train.learner import TrainConfig, Trainer
from moba_arena.train.trajectory import Trajectory


@dataclass(frozen=True)
class TaskSet:
    """(target hero, opponent hero) pairs, opponents played by BT."""

    tasks: tuple[tuple[str, str], ...]
    weights: tuple[float, ...] = ()
    opponent_level: int = 1

    def __post_init__(self):
        if not self.tasks:
            raise ConfigurationError("task set must be non-empty")
        catalog = set(hero_ids())
        for target, opponent in self.tasks:
            if target not in catalog or opponent not in catalog:
                raise ConfigurationError(f"unknown hero in task ({target}, {opponent})")
        if self.weights and len(self.weights) != len(self.tasks):
            raise ConfigurationError("weights must match tasks")

    def probabilities(self) -> np.ndarray:
        if not self.weights:
            return np.full(len(self.tasks), 1.0 / len(self.tasks))
        w = np.asarray(self.weights, dtype=np.float64)
        return w / w.sum()

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.choice(len(self.tasks), p=self.probabilities()))


def _multitask_worker(args: tuple) -> tuple:
    (flat, topology, version, task_payloads, probs, opponent_level, n_steps,
     seed, use_masks, gamma, lam) = args
    from moba_arena.replay import config_from_dict

    net = PolicyNet(**topology)
    net.set_flat(flat)
    net.version = version
    rng = np.random.default_rng(seed)
    envs = {}
    trajectories = []
    steps = 0
    episode = 0
    stats_samples = 0
    while steps < n_steps:
        task_idx = int(rng.choice(len(task_payloads), p=probs))
        if task_idx not in envs:
            config = config_from_dict(task_payloads[task_idx])
            envs[task_idx] = make_env(config, f"bt:{opponent_level}",
                                      lenient_illegal=not use_masks)
        env, camps = envs[task_idx]
        trajs, stats = actor_run(env, net, n_steps - steps, camps,
                                 seed=seed + episode * 7919, use_masks=use_masks,
                                 gamma=gamma, lam=lam, max_episodes=1)
        episode += 1
        steps += stats.steps
        stats_samples += stats.samples
        for traj in trajs:
            traj.task_idx = task_idx
            trajectories.append(traj)
    return trajectories, stats_samples


class MultitaskTrainer(Trainer):
    """Each actor episode samples a task; one shared policy for all tasks."""

    def __init__(self, cfg: TrainConfig, task_set: TaskSet):
        super().__init__(cfg)
        self.task_set = task_set

    def _task_payloads(self) -> list[dict]:
        import dataclasses

        from moba_arena.config import RewardWeights
        from moba_arena.replay import config_to_dict

        rewards = RewardWeights()
        if self.cfg.reward_overrides:
            rewards = dataclasses.replace(rewards, **self.cfg.reward_overrides)
        payloads = []
        for target, opponent in self.task_set.tasks:
            config = MatchConfig(camp0_hero=target, camp1_hero=opponent,
                                 seed=self.cfg.seed,
                                 time_limit_s=self.cfg.time_limit_s,
                                 rewards=rewards)
            payloads.append(config_to_dict(config))
        return payloads

    def collect(self) -> dict:
        topology = {"obs_dim": self.net.obs_dim, "hidden": self.net.hidden,
                    "memory": self.net.memory, "recurrent": self.net.recurrent}
        flat = self.net.flat()
        probs = self.task_set.probabilities()
        args = [(flat, topology, self.net.version, self._task_payloads(), probs,
                 self.task_set.opponent_level, self.cfg.steps_per_iteration,
                 self.cfg.seed + 100_003 * self.iteration + 997 * w,
                 self.cfg.use_masks, self.cfg.gamma, self.cfg.lam)
                for w in range(self.cfg.workers)]
        workers = self._workers()
        if workers is not None:
            results = workers.map(_multitask_worker, args)
        else:
            results = [_multitask_worker(a) for a in args]
        new_samples = 0
        for trajectories, samples in results:
            for traj in trajectories:
                self.pool.push(traj)
            new_samples += samples
        self.samples += new_samples
        return {"new_samples": new_samples}


def multitask_train(task_set: TaskSet, cfg: TrainConfig) -> tuple[PolicyNet, MultitaskTrainer]:
    trainer = MultitaskTrainer(cfg, task_set)
    net = trainer.run()
    trainer.close()
    return net, trainer


# ---------------------------------------------------------------------------
# Student-driven policy distillation
# ---------------------------------------------------------------------------

@dataclass
class DistillConfig:
    steps: int = 20_000
    batch_size: int = 512
    lr: float = 1e-3
    value_coef: float = 0.5
    time_limit_s: int = 240
    seed: int = 0
    episodes_per_round: int = 1


def _teacher_targets(teacher: PolicyNet, batch_obs, batch_masks):
    probs, values, _mem, _cache = teacher.forward(batch_obs, batch_masks)
    return probs, values


def _collect_student_states(student: PolicyNet, env, camps, n_steps: int,
                            seed: int) -> list[Trajectory]:
    trajs, _stats = actor_run(env, student, n_steps, camps, seed=seed)
    return trajs


def distill(teachers: dict[tuple[str, str], PolicyNet], student: PolicyNet | None,
            cfg: DistillConfig, opponent_level: int = 1) -> PolicyNet:
    """Student acts; each task's teacher supplies target head distributions.

    Teachers are routed by task id during training; the student itself never
    conditions on the task.
    """
    if not teachers:
        raise ConfigurationError("distillation needs at least one teacher")
    catalog = set(hero_ids())
    for target, opponent in teachers:
        if target not in catalog or opponent not in catalog:
            raise ConfigurationError(f"teacher task ({target}, {opponent}) "
                                     "references unknown heroes")
    tasks = sorted(teachers)
    first_teacher = teachers[tasks[0]]
    if student is None:
        student = PolicyNet(obs_dim=first_teacher.obs_dim,
                            hidden=first_teacher.hidden,
                            memory=first_teacher.memory,
                            recurrent=first_teacher.recurrent,
                            seed=cfg.seed + 555)
    adam = Adam(student.flat().size, lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)

    envs = {}
    for task in tasks:
        target, opponent = task
        config = MatchConfig(camp0_hero=target, camp1_hero=opponent,
                             seed=cfg.seed, time_limit_s=cfg.time_limit_s)
        envs[task] = make_env(config, f"bt:{opponent_level}")

    steps_done = 0
    round_idx = 0
    while steps_done < cfg.steps:
        task = tasks[round_idx % len(tasks)]
        round_idx += 1
        env, camps = envs[task]
        budget = min(cfg.batch_size * 4, cfg.steps - steps_done)
        trajs = _collect_student_states(student, env, camps, budget,
                                        seed=cfg.seed + round_idx * 1013)
        teacher = teachers[task]
        for traj in trajs:
            steps_done += len(traj)
            for start in range(0, len(traj), cfg.batch_size):
                sl = slice(start, min(start + cfg.batch_size, len(traj)))
                obs = traj.obs[sl].astype(np.float64)
                masks = {name: traj.masks[name][sl] for name in HEAD_NAMES}
                teacher_probs, teacher_values = _teacher_targets(teacher, obs, masks)
                batch = {
                    "obs": obs,
                    "masks": masks,
                    "consumed": traj.consumed[sl].astype(np.float64),
                    "teacher_probs": teacher_probs,
                    "teacher_values": teacher_values,
                }
                _loss, grads, _stats = distill_loss(student, batch,
                                                    value_coef=cfg.value_coef)
                student.set_flat(adam.step(student.flat(), student.grads_flat(grads)))
                student.version += 1
    return student


def heldout_kl(student: PolicyNet, teacher: PolicyNet, task: tuple[str, str],
               n_states: int = 500, seed: int = 999,
               opponent_level: int = 1, time_limit_s: int = 240) -> float:
    """Mean per-state KL(teacher || student) over consumed heads on fresh states."""
    target, opponent = task
    config = MatchConfig(camp0_hero=target, camp1_hero=opponent, seed=seed,
                         time_limit_s=time_limit_s)
    env, camps = make_env(config, f"bt:{opponent_level}")
    trajs = _collect_student_states(student, env, camps, n_states, seed=seed)
    total = 0.0
    count = 0
    from moba_arena.nn.distill import _kl

    for traj in trajs:
        obs = traj.obs.astype(np.float64)
        masks = {name: traj.masks[name] for name in HEAD_NAMES}
        teacher_probs, _tv = _teacher_targets(teacher, obs, masks)
        student_probs, _sv, _m, _c = student.forward(obs, masks)
        kl = np.zeros(len(traj))
        for hi, name in enumerate(HEAD_NAMES):
            kl += traj.consumed[:, hi] * _kl(teacher_probs[name], student_probs[name])
        total += kl.sum()
        count += len(traj)
    return total / max(1, count)


def transfer_report(models: dict[str, object], axis: str, fixed_hero: str,
                    heroes: list[str] | None = None, n_per_cell: int = 20,
                    opponent_level: int = 1, seeds: tuple[int, ...] = (0,),
                    time_limit_s: int = 600, workers: int = 1) -> dict:
    """Rows = models (direct/multitask/distilled), columns = hero axis."""
    from moba_arena.evalarena.matrix import task_matrix

    report: dict = {"axis": axis, "fixed_hero": fixed_hero, "rows": {}}
    for name, model in models.items():
        per_seed = []
        for seed in seeds:
            cells = task_matrix(model, axis, fixed_hero, n_per_cell=n_per_cell,
                                opponent_level=opponent_level, seed=seed,
                                time_limit_s=time_limit_s, workers=workers,
                                heroes=heroes)
            per_seed.append([c["win_rate"] for c in cells])
        arr = np.asarray(per_seed)
        report["rows"][name] = {
            "heroes": heroes if heroes is not None else hero_ids(),
            "mean": arr.mean(axis=0).tolist(),
            "std": arr.std(axis=0).tolist(),
        }
    return report
