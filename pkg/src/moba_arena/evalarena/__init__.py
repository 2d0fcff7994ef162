from moba_arena.evalarena.elo import EloTable, elo_expected, elo_update
from moba_arena.evalarena.matches import (MatchRecord, MatchStats,
                                          PolicyContestant, play_match,
                                          run_matches)
from moba_arena.evalarena.ladder import LadderRegistry
from moba_arena.evalarena.matrix import task_matrix

__all__ = ["EloTable", "elo_expected", "elo_update", "MatchRecord",
           "MatchStats", "PolicyContestant", "play_match", "run_matches",
           "LadderRegistry", "task_matrix"]
