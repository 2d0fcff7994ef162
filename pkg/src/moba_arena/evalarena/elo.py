"""Elo ratings over recorded matches (K = 200, new entrants at 1000)."""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_RATING = 1000.0
DEFAULT_K = 200.0


def elo_expected(rating_a: float, rating_b: float) -> float:
    return 1.0 / (1.0 + 10.0 ** ((rating_b - rating_a) / 400.0))


@dataclass
class EloTable:
    k: float = DEFAULT_K
    ratings: dict[str, float] = field(default_factory=dict)
    history: list[tuple[str, str, float]] = field(default_factory=list)

    def rating(self, contestant: str) -> float:
        return self.ratings.setdefault(contestant, DEFAULT_RATING)

    def total_mass(self) -> float:
        return sum(self.ratings.values())

    def record(self, a: str, b: str, score_a: float) -> None:
        """score_a: 1 win, 0 loss, 0.5 draw. Updates are zero-sum."""
        if not 0.0 <= score_a <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {score_a}")
        ra = self.rating(a)
        rb = self.rating(b)
        expected = elo_expected(ra, rb)
        delta = self.k * (score_a - expected)
        self.ratings[a] = ra + delta
        self.ratings[b] = rb - delta
        self.history.append((a, b, score_a))

    def standings(self) -> list[tuple[str, float]]:
        return sorted(self.ratings.items(), key=lambda kv: -kv[1])


def elo_update(table: EloTable, results: list[tuple[str, str, float]]) -> EloTable:
    """Apply (a, b, score_a) results in order; deterministic given history."""
    for a, b, score in results:
        table.record(a, b, score)
    return table
