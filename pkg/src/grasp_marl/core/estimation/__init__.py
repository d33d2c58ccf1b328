"""
Global critic, TD errors, GAE and return targets.
"""

from .advantages import gae, normalize_advantages, return_targets, td_errors
from .critic import Critic, MlpCritic, TabularCritic, critic_loss, critic_update
from .evaluation import exact_state_values

__all__ = [
    "td_errors",
    "gae",
    "return_targets",
    "normalize_advantages",
    "Critic",
    "TabularCritic",
    "MlpCritic",
    "critic_loss",
    "critic_update",
    "exact_state_values",
]
