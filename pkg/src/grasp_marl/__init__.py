"""
GRASP-MARL - Consensus-gradient cooperative multi-agent reinforcement learning.

This package trains decentralized agent policies with a centralized critic,
adding to every agent's PPO update the minimum-norm point of the convex hull
of the agents' policy gradients, and ships the property suites that certify
the consensus solver, gradients, advantages and critic.
"""

__version__ = "0.1.0"
__author__ = "GRASP-MARL Team"
__license__ = "MIT"

# Import only essential components to avoid circular imports
from .utils import get_logger

__all__ = [
    # Version info
    "__version__",
    "__author__",
    "__license__",

    # Essential utilities
    "get_logger",
]
