"""Rollout actors: policy and random agents playing through the env."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from moba_arena.actions import Action, HEAD_NAMES, HEAD_SIZES
from moba_arena.config import MatchConfig
from moba_arena.env import Arena1v1Env
from moba_arena.masks import LegalMask
from moba_arena.nn.net import PolicyNet
from moba_arena.nn.sample import sample_action
from moba_arena.train.trajectory import Trajectory


class RandomMaskedAgent:
    """Uniform over legal entries of every head; exercises the mask contract."""

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def act(self, legal_flat: np.ndarray, sub_rows: np.ndarray) -> Action:
        mask = LegalMask.from_flat(legal_flat)
        button_legal = np.flatnonzero(mask.button)
        button = int(self.rng.choice(button_legal))
        row = sub_rows[button]
        indices = {"button": button}
        for si, name in enumerate(("move_x", "move_z", "skill_x", "skill_z", "target")):
            if row[si]:
                legal = np.flatnonzero(mask.head(name))
                indices[name] = int(self.rng.choice(legal))
            else:
                indices[name] = 0
        return Action(**indices)


class PolicyAgent:
    """Samples from the network; per-step records feed trajectories."""

    def __init__(self, net: PolicyNet, seed: int = 0, use_masks: bool = True,
                 greedy: bool = False):
        self.net = net
        self.rng = np.random.default_rng(seed)
        self.use_masks = use_masks
        self.greedy = greedy
        self.memory = net.initial_memory(1)

    def reset_memory(self) -> None:
        self.memory = self.net.initial_memory(1)

    def act(self, obs: np.ndarray, legal_flat: np.ndarray, sub_rows: np.ndarray):
        mask = LegalMask.from_flat(legal_flat)
        masks = {}
        for name, size in zip(HEAD_NAMES, HEAD_SIZES):
            if self.use_masks:
                masks[name] = mask.head(name).reshape(1, size)
            else:
                masks[name] = np.ones((1, size), dtype=np.int8)
        probs, value, mem_out, _cache = self.net.forward(obs.reshape(1, -1), masks,
                                                         self.memory)
        mem_in = self.memory.copy()
        self.memory = mem_out
        if self.greedy:
            from moba_arena.nn.sample import greedy_action

            action = greedy_action({k: v[0] for k, v in probs.items()}, sub_rows)
            return action, None
        action, _joint, per_head, consumed = sample_action(
            {k: v[0] for k, v in probs.items()}, sub_rows, self.rng)
        record = {
            "masks": {name: masks[name][0] for name in HEAD_NAMES},
            "logps": per_head,
            "consumed": consumed,
            "value": float(value[0]),
            "mem_in": mem_in[0],
        }
        return action, record


@dataclass
class ActorStats:
    episodes: int = 0
    steps: int = 0
    samples: int = 0
    wins: list[int] = field(default_factory=lambda: [0, 0])
    draws: int = 0


class _TrajectoryBuffer:
    def __init__(self, camp: int):
        self.camp = camp
        self.obs, self.actions, self.logps = [], [], []
        self.consumed, self.values, self.rewards = [], [], []
        self.masks = {name: [] for name in HEAD_NAMES}
        self.memories = []

    def add(self, obs, action: Action, record: dict, reward: float) -> None:
        self.obs.append(obs)
        self.actions.append(action.as_list())
        self.logps.append(record["logps"])
        self.consumed.append(record["consumed"])
        self.values.append(record["value"])
        self.rewards.append(reward)
        self.memories.append(record["mem_in"])
        for name in HEAD_NAMES:
            self.masks[name].append(record["masks"][name])

    def finish(self, done: bool, bootstrap: float, version: int,
               gamma: float, lam: float) -> Trajectory | None:
        if not self.obs:
            return None
        steps = len(self.obs)
        dones = np.zeros(steps, dtype=np.int8)
        if done:
            dones[-1] = 1
        traj = Trajectory(
            obs=np.asarray(self.obs, dtype=np.float32),
            masks={name: np.asarray(self.masks[name], dtype=np.int8)
                   for name in HEAD_NAMES},
            actions=np.asarray(self.actions, dtype=np.int16),
            logps=np.asarray(self.logps, dtype=np.float64),
            consumed=np.asarray(self.consumed, dtype=np.int8),
            values=np.asarray(self.values, dtype=np.float64),
            rewards=np.asarray(self.rewards, dtype=np.float64),
            dones=dones,
            memories=np.asarray(self.memories, dtype=np.float32),
            version=version,
            bootstrap_value=0.0 if done else bootstrap,
        )
        traj.compute_gae(gamma, lam)
        return traj


def make_env(config: MatchConfig, opponent: str,
             lenient_illegal: bool = False) -> tuple[Arena1v1Env, list[int]]:
    """Build an env for `mirror` or `bt:LEVEL` opponents.

    Returns (env, learning_camps).
    """
    if opponent == "mirror":
        env = Arena1v1Env(config, include_raw_state=False,
                          lenient_illegal=lenient_illegal)
        return env, [0, 1]
    if opponent.startswith("bt:"):
        from moba_arena.bt import make_bt_controller

        level = int(opponent.split(":", 1)[1])
        controller = make_bt_controller(config.camp1_hero, level)
        env = Arena1v1Env(config, controllers={1: controller},
                          include_raw_state=False, lenient_illegal=lenient_illegal)
        return env, [0]
    raise ValueError(f"unknown opponent spec {opponent!r}")


def actor_run(env: Arena1v1Env, net: PolicyNet, n_steps: int,
              learning_camps: list[int], seed: int = 0, use_masks: bool = True,
              gamma: float = 0.997, lam: float = 0.95,
              pool=None, max_episodes: int | None = None,
              finish_episode: bool = True) -> tuple[list[Trajectory], ActorStats]:
    """Play whole episodes until at least n_steps env steps are collected.

    Mirror mode passes `learning_camps=[0, 1]` (two trajectories per episode,
    same parameters both camps); vs-BT mode learns camp 0 only. By default
    the last episode plays out to terminal so trajectories carry the final
    reward; `finish_episode=False` truncates with a bootstrap value instead.
    """
    stats = ActorStats()
    trajectories: list[Trajectory] = []
    agents = {camp: PolicyAgent(net, seed=seed * 1000 + camp + 1, use_masks=use_masks)
              for camp in learning_camps}
    episode_idx = 0

    while stats.steps < n_steps and (max_episodes is None or episode_idx < max_episodes):
        obs, _rewards, _dones, infos = env.reset(seed=seed + episode_idx * 7919)
        episode_idx += 1
        for agent in agents.values():
            agent.reset_memory()
        buffers = {camp: _TrajectoryBuffer(camp) for camp in learning_camps}
        done = False
        while not done and (finish_episode or stats.steps < n_steps):
            actions = [Action(), Action()]
            records = {}
            for camp in learning_camps:
                action, record = agents[camp].act(
                    obs[camp], infos[camp]["legal_action"],
                    infos[camp]["sub_action_mask"])
                actions[camp] = action
                records[camp] = (obs[camp], action, record)
            obs, rewards, dones, infos = env.step(actions)
            done = dones[0]
            stats.steps += 1
            for camp in learning_camps:
                o, action, record = records[camp]
                buffers[camp].add(o, action, record, rewards[camp])
                stats.samples += 1

        bootstrap = {camp: 0.0 for camp in learning_camps}
        if not done:
            # Truncated: bootstrap from the value of the next observation.
            for camp in learning_camps:
                action, record = agents[camp].act(
                    obs[camp], infos[camp]["legal_action"],
                    infos[camp]["sub_action_mask"])
                bootstrap[camp] = record["value"]
        else:
            stats.episodes += 1
            outcome = env.outcome()
            if outcome is not None:
                if outcome.winner == "camp0-win":
                    stats.wins[0] += 1
                elif outcome.winner == "camp1-win":
                    stats.wins[1] += 1
                else:
                    stats.draws += 1

        for camp in learning_camps:
            traj = buffers[camp].finish(done, bootstrap[camp], net.version, gamma, lam)
            if traj is not None:
                trajectories.append(traj)
                if pool is not None:
                    pool.push(traj)
    return trajectories, stats
