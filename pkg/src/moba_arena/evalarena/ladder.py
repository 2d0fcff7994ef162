"""Content-addressed checkpoint registry with Elo-banded ladder levels."""

from __future__ import annotations

import json
import os
import shutil

from moba_arena.train.checkpoint import file_digest

LEVEL_BASE = 1000.0
LEVEL_STEP = 300.0


class LadderError(RuntimeError):
    pass


def elo_to_level(elo: float) -> int:
    """Level k covers [1000 + 300(k-1), 1000 + 300k); floor at level 1."""
    if elo < LEVEL_BASE:
        return 1
    return int((elo - LEVEL_BASE) // LEVEL_STEP) + 1


class LadderRegistry:
    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._meta_path = os.path.join(root, "registry.json")
        self.entries: dict[str, dict] = {}
        if os.path.exists(self._meta_path):
            with open(self._meta_path, "r", encoding="utf-8") as handle:
                self.entries = json.load(handle)

    def _save_meta(self) -> None:
        with open(self._meta_path, "w", encoding="utf-8") as handle:
            json.dump(self.entries, handle, indent=2, sort_keys=True)

    def register(self, checkpoint_path: str, hero: str, samples: int,
                 elo: float, entry_id: str | None = None) -> str:
        digest = file_digest(checkpoint_path)
        entry_id = entry_id or digest[:16]
        if entry_id in self.entries:
            raise LadderError(f"duplicate registry id {entry_id!r}")
        stored = os.path.join(self.root, f"{entry_id}.npz")
        shutil.copyfile(checkpoint_path, stored)
        self.entries[entry_id] = {
            "digest": digest,
            "hero": hero,
            "samples": samples,
            "elo": elo,
            "level": elo_to_level(elo),
            "file": os.path.basename(stored),
        }
        self._save_meta()
        return entry_id

    def path(self, entry_id: str) -> str:
        entry = self.entries.get(entry_id)
        if entry is None:
            raise LadderError(f"unknown registry id {entry_id!r}")
        return os.path.join(self.root, entry["file"])

    def load(self, entry_id: str):
        from moba_arena.train.checkpoint import load_checkpoint

        entry = self.entries.get(entry_id)
        if entry is None:
            raise LadderError(f"unknown registry id {entry_id!r}")
        path = self.path(entry_id)
        if file_digest(path) != entry["digest"]:
            raise LadderError(f"checkpoint {entry_id} is corrupt: digest mismatch")
        return load_checkpoint(path)

    def set_elo(self, entry_id: str, elo: float) -> None:
        entry = self.entries.get(entry_id)
        if entry is None:
            raise LadderError(f"unknown registry id {entry_id!r}")
        entry["elo"] = elo
        entry["level"] = elo_to_level(elo)
        self._save_meta()

    def by_level(self, hero: str | None = None) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for entry_id, entry in sorted(self.entries.items()):
            if hero is not None and entry["hero"] != hero:
                continue
            out.setdefault(entry["level"], []).append(entry_id)
        return out
