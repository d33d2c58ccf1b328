"""
Matrix Games

Repeated one-shot cooperative games: every agent sees a single dummy
observation, the team reward is a payoff-tensor lookup and the episode ends
with a terminal step after a configured number of rounds. The critic state is
the round index.
"""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ...utils.constants import DEFAULT_MATRIX_EPISODE_LENGTH
from ...utils.exceptions import InvalidActionError
from ..numerics import RngStream
from .base import CooperativeEnv, EnvSpec, StepResult

DUMMY_OBSERVATION = 0


@dataclass(frozen=True)
class MatrixGameState:
    t: int
    episode_length: int


def validate_payoff(payoff: Any) -> np.ndarray:
    """
    Payoff tensor with one axis per agent, all of equal length.

    Raises:
        ValueError: ragged, empty, non-finite, or heterogeneous action counts
    """
    try:
        tensor = np.asarray(payoff, dtype=np.float64)
    except ValueError as e:
        raise ValueError(f"payoff must be a rectangular nested array ({e})") from e
    if tensor.ndim < 1 or tensor.size == 0:
        raise ValueError("payoff must have one axis per agent")
    if len(set(tensor.shape)) != 1:
        raise ValueError(f"payoff axes must all have the same length, got shape {tensor.shape}")
    if not np.all(np.isfinite(tensor)):
        raise ValueError("payoff entries must be finite")
    return tensor


def matrix_game_step(state: MatrixGameState, joint_action: Sequence[int],
                     payoff: np.ndarray) -> Tuple[MatrixGameState, StepResult]:
    """
    Look up the team reward and advance the round counter.

    Raises:
        InvalidActionError: wrong number of actions or an action out of range
    """
    actions = tuple(int(a) for a in joint_action)
    if len(actions) != payoff.ndim:
        raise InvalidActionError(f"Expected {payoff.ndim} actions, got {len(actions)}")
    for agent, action in enumerate(actions):
        if not 0 <= action < payoff.shape[agent]:
            raise InvalidActionError(f"Agent {agent} action {action} outside [0, {payoff.shape[agent]})")

    reward = float(payoff[actions])
    next_state = MatrixGameState(state.t + 1, state.episode_length)
    terminal = next_state.t >= state.episode_length
    result = StepResult(
        observations=[DUMMY_OBSERVATION] * payoff.ndim,
        reward=reward,
        terminal=terminal,
        info={"truncated": False, "joint_action": actions},
    )
    return next_state, result


class MatrixGameEnv(CooperativeEnv):
    """Repeated cooperative matrix game over a payoff tensor."""

    def __init__(self, payoff: Any, episode_length: int = DEFAULT_MATRIX_EPISODE_LENGTH):
        self.payoff = validate_payoff(payoff)
        if episode_length < 1:
            raise ValueError("episode_length must be >= 1")
        self.episode_length = episode_length
        self.spec = EnvSpec(
            n_agents=self.payoff.ndim,
            n_actions=self.payoff.shape[0],
            observation_dim=1,
            max_episode_length=episode_length,
            state_dim=episode_length,
            n_observations=1,
            n_states=episode_length,
        )
        self._state = MatrixGameState(0, episode_length)

    def reset(self, rng: Optional[RngStream] = None) -> List[int]:
        self._state = MatrixGameState(0, self.episode_length)
        return [DUMMY_OBSERVATION] * self.spec.n_agents

    def step(self, joint_action) -> StepResult:
        self._state, result = matrix_game_step(self._state, joint_action, self.payoff)
        return result

    def global_state(self) -> Tuple[int, np.ndarray]:
        t = min(self._state.t, self.episode_length - 1)
        features = np.zeros(self.episode_length)
        features[t] = 1.0
        return t, features

    @property
    def optimal_joint_action(self) -> Tuple[int, ...]:
        """Joint action of maximal payoff (first in index order on ties)."""
        return tuple(int(i) for i in np.unravel_index(int(np.argmax(self.payoff)), self.payoff.shape))

    def expected_reward(self, probabilities: Sequence[np.ndarray]) -> float:
        """Expected payoff when agents play independent mixed strategies."""
        value = self.payoff
        for probs in reversed(list(probabilities)):
            value = value @ np.asarray(probs, dtype=np.float64)
        return float(value)
