from moba_arena.nn.net import PolicyNet, QNet, masked_softmax, policy_forward
from moba_arena.nn.gae import gae
from moba_arena.nn.ppo import ppo_loss
from moba_arena.nn.dqn import dqn_loss
from moba_arena.nn.adam import Adam
from moba_arena.nn.gradcheck import grad_check
from moba_arena.nn.sample import sample_action

__all__ = ["PolicyNet", "QNet", "masked_softmax", "policy_forward", "gae",
           "ppo_loss", "dqn_loss", "Adam", "grad_check", "sample_action"]
