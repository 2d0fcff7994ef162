"""Match replay logs: newline-delimited {frame_no, actions, digest} records.

The first line is a header carrying the full match configuration; replaying
the recorded actions must reproduce every digest bit-exactly.
"""

from __future__ import annotations

import dataclasses
import json
from typing import IO

from moba_arena.actions import Action
from moba_arena.config import EngineConfig, MatchConfig, RewardWeights
from moba_arena.engine import advance, new_match


class ReplayMismatch(RuntimeError):
    def __init__(self, frame_no: int, expected: str, actual: str):
        self.frame_no = frame_no
        super().__init__(f"digest mismatch at frame {frame_no}: "
                         f"expected {expected[:16]}.., got {actual[:16]}..")


def config_to_dict(config: MatchConfig) -> dict:
    return {
        "camp0_hero": config.camp0_hero,
        "camp1_hero": config.camp1_hero,
        "seed": config.seed,
        "time_limit_s": config.time_limit_s,
        "engine": dataclasses.asdict(config.engine),
        "rewards": dataclasses.asdict(config.rewards),
    }


def config_from_dict(payload: dict) -> MatchConfig:
    return MatchConfig(
        camp0_hero=payload["camp0_hero"],
        camp1_hero=payload["camp1_hero"],
        seed=payload["seed"],
        time_limit_s=payload.get("time_limit_s"),
        engine=EngineConfig(**payload["engine"]),
        rewards=RewardWeights(**payload["rewards"]),
    )


class ReplayWriter:
    def __init__(self, stream: IO[str], config: MatchConfig):
        self._stream = stream
        self._stream.write(json.dumps({"type": "header",
                                       "config": config_to_dict(config)}) + "\n")

    def record(self, frame_no: int, actions, digest: str) -> None:
        self._stream.write(json.dumps({
            "frame_no": frame_no,
            "actions": [a.as_list() for a in actions],
            "digest": digest,
        }, separators=(",", ":")) + "\n")


def record_match(path: str, config: MatchConfig, controllers, max_steps: int | None = None) -> int:
    """Play controllers[camp](state, camp) to terminal, logging each boundary."""
    state = new_match(config)
    steps = 0
    with open(path, "w", encoding="utf-8") as stream:
        writer = ReplayWriter(stream, config)
        while state.outcome is None:
            actions = tuple(controllers[camp](state, camp) for camp in (0, 1))
            state, _ = advance(state, actions)
            writer.record(state.frame_no, actions, state.digest())
            steps += 1
            if max_steps is not None and steps >= max_steps:
                break
    return steps


def verify_replay(path: str) -> int:
    """Re-simulate a log; returns the number of verified records."""
    with open(path, "r", encoding="utf-8") as stream:
        header = json.loads(stream.readline())
        if header.get("type") != "header":
            raise ValueError(f"{path}: missing replay header")
        config = config_from_dict(header["config"])
        state = new_match(config)
        verified = 0
        for line in stream:
            record = json.loads(line)
            actions = tuple(Action.from_list(a) for a in record["actions"])
            state, _ = advance(state, actions)
            digest = state.digest()
            if digest != record["digest"]:
                raise ReplayMismatch(record["frame_no"], record["digest"], digest)
            verified += 1
    return verified
