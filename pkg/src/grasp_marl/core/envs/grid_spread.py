"""
Grid Spread

N agents on a W x W grid cover N landmarks. The team reward is minus the sum
over landmarks of the nearest agent's Manhattan distance, minus a penalty per
co-located agent pair. Episodes are truncated at the step limit.
"""

from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

from ...utils.constants import (
    GRID_SPREAD_AGENTS, GRID_SPREAD_COLLISION_PENALTY, GRID_SPREAD_EPISODE_LENGTH, GRID_SPREAD_WIDTH
)
from ...utils.exceptions import InvalidActionError
from ..numerics import RngStream
from .base import CooperativeEnv, EnvSpec, StepResult

# stay, up, down, left, right as (row, col) offsets
MOVES = np.array([[0, 0], [-1, 0], [1, 0], [0, -1], [0, 1]], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class GridState:
    agents: np.ndarray      # (N, 2) int cells
    landmarks: np.ndarray   # (L, 2) int cells
    width: int
    t: int = 0


def coverage_reward(agents: np.ndarray, landmarks: np.ndarray, collision_penalty: float) -> float:
    """``-sum_l min_i |x_i - l|_1 - penalty * #co-located pairs``."""
    distances = np.abs(agents[:, None, :] - landmarks[None, :, :]).sum(axis=2)
    cover = float(distances.min(axis=0).sum()) if len(landmarks) else 0.0
    collisions = 0
    n = len(agents)
    for i in range(n):
        for j in range(i + 1, n):
            if agents[i, 0] == agents[j, 0] and agents[i, 1] == agents[j, 1]:
                collisions += 1
    return -cover - collision_penalty * collisions


def _observations(state: GridState) -> List[np.ndarray]:
    scale = max(1, state.width - 1)
    shared = np.concatenate([state.agents.reshape(-1), state.landmarks.reshape(-1)]) / scale
    return [np.concatenate([state.agents[i] / scale, shared]) for i in range(len(state.agents))]


def grid_spread_step(state: GridState, joint_action: Sequence[int], collision_penalty: float,
                     episode_length: int) -> Tuple[GridState, StepResult]:
    """
    Move every agent (walls clip), then score the new layout.

    Raises:
        InvalidActionError: wrong number of actions or an id outside 0..4
    """
    actions = np.asarray([int(a) for a in joint_action], dtype=np.int64)
    if actions.size != len(state.agents):
        raise InvalidActionError(f"Expected {len(state.agents)} actions, got {actions.size}")
    bad = np.nonzero((actions < 0) | (actions >= len(MOVES)))[0]
    if bad.size:
        raise InvalidActionError(f"Agent {int(bad[0])} action {int(actions[bad[0]])} outside [0, {len(MOVES)})")

    agents = np.clip(state.agents + MOVES[actions], 0, state.width - 1)
    next_state = replace(state, agents=agents, t=state.t + 1)
    truncated = next_state.t >= episode_length
    result = StepResult(
        observations=_observations(next_state),
        reward=coverage_reward(agents, state.landmarks, collision_penalty),
        terminal=False,
        info={"truncated": truncated},
    )
    return next_state, result


class GridSpreadEnv(CooperativeEnv):
    """Discrete coverage task with fully observed agent and landmark cells."""

    def __init__(self, n_agents: int = GRID_SPREAD_AGENTS, width: int = GRID_SPREAD_WIDTH,
                 episode_length: int = GRID_SPREAD_EPISODE_LENGTH,
                 collision_penalty: float = GRID_SPREAD_COLLISION_PENALTY):
        if width < 1 or n_agents < 1:
            raise ValueError("grid width and agent count must be >= 1")
        if n_agents > width * width:
            raise ValueError("grid too small to place distinct landmarks")
        self.n_agents = n_agents
        self.width = width
        self.episode_length = episode_length
        self.collision_penalty = float(collision_penalty)
        self.spec = EnvSpec(
            n_agents=n_agents,
            n_actions=len(MOVES),
            observation_dim=2 + 4 * n_agents,
            max_episode_length=episode_length,
            state_dim=4 * n_agents,
        )
        self._state = GridState(np.zeros((n_agents, 2), dtype=np.int64),
                                np.zeros((n_agents, 2), dtype=np.int64), width)

    @property
    def state(self) -> GridState:
        return self._state

    def reset(self, rng: RngStream) -> List[np.ndarray]:
        cells = rng.permutation(self.width * self.width)[:self.n_agents]
        landmarks = np.stack([cells // self.width, cells % self.width], axis=1).astype(np.int64)
        agents = rng.integers(0, self.width, size=(self.n_agents, 2)).astype(np.int64)
        self._state = GridState(agents, landmarks, self.width, 0)
        return _observations(self._state)

    def step(self, joint_action) -> StepResult:
        self._state, result = grid_spread_step(self._state, joint_action, self.collision_penalty,
                                               self.episode_length)
        return result

    def global_state(self) -> Tuple[None, np.ndarray]:
        scale = max(1, self.width - 1)
        return None, np.concatenate([self._state.agents.reshape(-1), self._state.landmarks.reshape(-1)]) / scale
