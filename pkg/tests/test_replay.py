import json

import numpy as np
import pytest

from conftest import sample_legal_action

from moba_arena.config import MatchConfig
from moba_arena.replay import ReplayMismatch, record_match, verify_replay


def _random_controllers(seed: int):
    rng = np.random.default_rng(seed)

    def controller(state, camp):
        return sample_legal_action(state, camp, rng)

    return {0: controller, 1: controller}


def test_replay_roundtrip(tmp_path):
    config = MatchConfig(seed=12, time_limit_s=60)
    path = str(tmp_path / "match.jsonl")
    steps = record_match(path, config, _random_controllers(3), max_steps=120)
    assert steps > 0
    assert verify_replay(path) == steps


def test_replay_detects_tampering(tmp_path):
    config = MatchConfig(seed=12, time_limit_s=60)
    path = str(tmp_path / "match.jsonl")
    record_match(path, config, _random_controllers(3), max_steps=40)
    lines = open(path).read().splitlines()
    record = json.loads(lines[10])
    record["actions"][0][0] = 1 if record["actions"][0][0] == 0 else 0
    lines[10] = json.dumps(record)
    open(path, "w").write("\n".join(lines) + "\n")
    with pytest.raises(ReplayMismatch):
        verify_replay(path)


def test_replay_header_required(tmp_path):
    path = str(tmp_path / "bad.jsonl")
    open(path, "w").write('{"frame_no": 4}\n')
    with pytest.raises(ValueError, match="header"):
        verify_replay(path)
