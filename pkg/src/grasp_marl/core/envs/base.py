"""
Environment Interfaces

Shared-reward cooperative environments: every agent receives the same scalar
reward each step.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..numerics import RngStream

REWARD_TEAM_SHARED = "team-shared"


@dataclass(frozen=True)
class EnvSpec:
    """Agent count, per-agent spaces and episode limits of an environment."""

    n_agents: int
    n_actions: int
    observation_dim: int
    max_episode_length: int
    state_dim: int
    n_observations: Optional[int] = None
    n_states: Optional[int] = None
    reward_semantics: str = REWARD_TEAM_SHARED

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("EnvSpec needs at least one agent")
        if self.n_actions < 1 or self.max_episode_length < 1:
            raise ValueError("EnvSpec needs non-empty action space and episode length")

    @property
    def tabular(self) -> bool:
        """Observations are enumerable ids."""
        return self.n_observations is not None


@dataclass
class StepResult:
    """Outcome of one joint step."""

    observations: List[Any]
    reward: float
    terminal: bool
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def truncated(self) -> bool:
        return bool(self.info.get("truncated", False))


class CooperativeEnv(ABC):
    """A single-owner environment instance."""

    spec: EnvSpec

    @abstractmethod
    def reset(self, rng: RngStream) -> List[Any]:
        """Start an episode and return one observation per agent."""

    @abstractmethod
    def step(self, joint_action) -> StepResult:
        """Apply one action per agent."""

    @abstractmethod
    def global_state(self) -> Tuple[Optional[int], np.ndarray]:
        """Critic input: ``(state id or None, state features)``."""
