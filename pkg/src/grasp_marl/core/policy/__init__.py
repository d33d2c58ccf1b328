"""
Agent policies, parameter layouts, gradients and checkpoints.
"""

from .checkpoint import CheckpointError, read_checkpoint, write_checkpoint
from .gradients import (
    SurrogateResult, finite_difference_check, local_policy_gradient, local_policy_gradient_parts,
    surrogate_and_gradient
)
from .networks import ActionDistribution, Policy, SharedMlpPolicy, TabularSoftmaxPolicy, softmax
from .params import ParamLayout, PolicyParams

__all__ = [
    "ActionDistribution",
    "Policy",
    "TabularSoftmaxPolicy",
    "SharedMlpPolicy",
    "softmax",
    "ParamLayout",
    "PolicyParams",
    "SurrogateResult",
    "local_policy_gradient",
    "local_policy_gradient_parts",
    "finite_difference_check",
    "surrogate_and_gradient",
    "write_checkpoint",
    "read_checkpoint",
    "CheckpointError",
]
