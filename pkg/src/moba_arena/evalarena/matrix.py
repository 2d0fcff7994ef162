"""Task matrices: one model evaluated across the 20-hero axis."""

from __future__ import annotations

import csv

from moba_arena.evalarena.matches import resolve_contestant, run_matches
from moba_arena.heroes import hero_ids


def task_matrix(model, axis: str, fixed_hero: str, n_per_cell: int = 50,
                opponent_level: int = 1, seed: int = 0,
                time_limit_s: int = 600, workers: int = 1,
                heroes: list[str] | None = None) -> list[dict]:
    """Win-rate vector over the hero axis.

    vary-opponent: the model controls `fixed_hero` against each hero's BT.
    vary-target:   the model controls each hero against `fixed_hero`'s BT.
    """
    if axis not in ("vary-opponent", "vary-target"):
        raise ValueError(f"axis must be vary-opponent|vary-target, got {axis!r}")
    contestant = resolve_contestant(model)
    cells = []
    for hero in heroes if heroes is not None else hero_ids():
        if axis == "vary-opponent":
            task = (fixed_hero, hero)
        else:
            task = (hero, fixed_hero)
        stats = run_matches(contestant, f"bt:{opponent_level}", task=task,
                            n=n_per_cell, paired_seeds=True, seed=seed,
                            time_limit_s=time_limit_s, workers=workers)
        cells.append({
            "hero": hero,
            "task": f"{task[0]}-vs-{task[1]}",
            "win_rate": stats.win_rate_a,
            "std": stats.win_rate_std,
            "n": stats.n,
        })
    return cells


def write_matrix_csv(cells: list[dict], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=["hero", "task", "win_rate",
                                                    "std", "n"])
        writer.writeheader()
        writer.writerows(cells)
