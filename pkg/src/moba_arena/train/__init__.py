from moba_arena.train.trajectory import Trajectory, build_batch
from moba_arena.train.pool import MemoryPool
from moba_arena.train.actor import PolicyAgent, RandomMaskedAgent, actor_run
from moba_arena.train.learner import TrainConfig, Trainer, learner_step
from moba_arena.train.checkpoint import load_checkpoint, save_checkpoint

__all__ = ["Trajectory", "build_batch", "MemoryPool", "PolicyAgent",
           "RandomMaskedAgent", "actor_run", "TrainConfig", "Trainer",
           "learner_step", "load_checkpoint", "save_checkpoint"]
