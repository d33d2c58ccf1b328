"""
Exact policy evaluation on the matrix-game chain.

The critic state of a repeated matrix game is the round index, so V^pi solves
``V(t) = r_bar + gamma * V(t + 1)`` with ``V(L) = 0``.
"""

import numpy as np

from ..envs.matrix_game import DUMMY_OBSERVATION, MatrixGameEnv
from ..policy.networks import Policy
from ..policy.params import PolicyParams


def exact_state_values(env: MatrixGameEnv, policy: Policy, params: PolicyParams, gamma: float) -> np.ndarray:
    """V^pi for every round index, by a linear solve of the Bellman evaluation equations."""
    probabilities = [
        policy.action_distribution(DUMMY_OBSERVATION, agent, params).probabilities
        for agent in range(env.spec.n_agents)
    ]
    r_bar = env.expected_reward(probabilities)
    L = env.episode_length
    transition = np.eye(L, k=1)
    return np.linalg.solve(np.eye(L) - gamma * transition, np.full(L, r_bar))
