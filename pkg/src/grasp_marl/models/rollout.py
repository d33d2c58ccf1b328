"""
Rollout Data Models

Sampled steps, advantage batches and the rollout batch collected each iteration.
"""

from dataclasses import dataclass, replace
from typing import Any, List, Optional, Sequence

import numpy as np

from ..utils.exceptions import DimensionMismatchError, EmptyBatchError


@dataclass(frozen=True)
class SampledStep:
    """One agent's decision at one time step, with its behaviour log-probability."""

    observation: Any
    action: int
    log_prob: float
    agent: int
    time_index: int


@dataclass(eq=False)
class AdvantageBatch:
    """Per-timestep TD errors, advantages and return targets."""

    deltas: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray
    episode_ends: np.ndarray

    def __post_init__(self):
        lengths = {len(self.deltas), len(self.advantages), len(self.returns), len(self.episode_ends)}
        if len(lengths) != 1:
            raise DimensionMismatchError(range(4), [len(self.deltas), len(self.advantages),
                                                    len(self.returns), len(self.episode_ends)],
                                         "advantage batch fields")

    def __len__(self) -> int:
        return len(self.advantages)


@dataclass(eq=False)
class RolloutBatch:
    """
    Trajectories of all agents over a whole iteration, time-aligned.

    ``observations[i]`` is ``(T,)`` observation ids or ``(T, F)`` features;
    ``actions`` and ``log_probs`` are ``(N, T)``; every other per-step array is
    ``(T,)``. ``next_values`` holds the bootstrap value V(s_{t+1}) under the
    old critic, 0 at terminal steps.
    """

    observations: List[np.ndarray]
    actions: np.ndarray
    log_probs: np.ndarray
    rewards: np.ndarray
    terminals: np.ndarray
    truncations: np.ndarray
    time_indices: np.ndarray
    values_old: np.ndarray
    next_values: np.ndarray
    state_ids: Optional[np.ndarray] = None
    state_features: Optional[np.ndarray] = None
    advantage: Optional[AdvantageBatch] = None
    episode_returns: Optional[np.ndarray] = None

    def __post_init__(self):
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.log_probs = np.asarray(self.log_probs, dtype=np.float64)
        if self.actions.ndim != 2 or self.actions.shape != self.log_probs.shape:
            raise DimensionMismatchError([0, 1], [self.actions.size, self.log_probs.size], "actions and log-probabilities")
        if len(self.observations) != self.actions.shape[0]:
            raise DimensionMismatchError([0], [len(self.observations)], "per-agent observation streams")
        for agent, obs in enumerate(self.observations):
            if len(obs) != self.size:
                raise DimensionMismatchError([agent], [len(obs)], f"observations vs {self.size} time steps")

    @classmethod
    def from_samples(cls, observations: Sequence[Any], actions: Any, log_probs: Any,
                     advantages: Any, values_old: Any = None) -> 'RolloutBatch':
        """
        Build a batch from sampled decisions and precomputed advantages.

        Rewards are zero, every step is its own terminal episode and
        ``values_old`` defaults to zeros, so the return targets equal the
        advantages plus ``values_old``.
        """
        actions = np.atleast_2d(np.asarray(actions, dtype=np.int64))
        log_probs = np.atleast_2d(np.asarray(log_probs, dtype=np.float64))
        adv = np.asarray(advantages, dtype=np.float64).reshape(-1)
        T = adv.size
        v_old = np.zeros(T) if values_old is None else np.asarray(values_old, dtype=np.float64)
        ends = np.ones(T, dtype=bool)
        return cls(
            observations=[np.asarray(o) for o in observations],
            actions=actions,
            log_probs=log_probs,
            rewards=np.zeros(T),
            terminals=ends.copy(),
            truncations=np.zeros(T, dtype=bool),
            time_indices=np.zeros(T, dtype=np.int64),
            values_old=v_old,
            next_values=np.zeros(T),
            advantage=AdvantageBatch(deltas=adv.copy(), advantages=adv, returns=adv + v_old, episode_ends=ends),
        )

    @property
    def n_agents(self) -> int:
        return int(self.actions.shape[0])

    @property
    def size(self) -> int:
        return int(self.actions.shape[1])

    @property
    def episode_ends(self) -> np.ndarray:
        return np.logical_or(self.terminals, self.truncations)

    @property
    def advantages(self) -> np.ndarray:
        if self.advantage is None:
            raise EmptyBatchError("Batch has no advantages; run advantage estimation first")
        return self.advantage.advantages

    @property
    def returns(self) -> np.ndarray:
        if self.advantage is None:
            raise EmptyBatchError("Batch has no return targets; run advantage estimation first")
        return self.advantage.returns

    @property
    def mean_episode_return(self) -> float:
        if self.episode_returns is None or len(self.episode_returns) == 0:
            return 0.0
        return float(np.mean(self.episode_returns))

    def step(self, agent: int, t: int) -> SampledStep:
        return SampledStep(
            observation=self.observations[agent][t],
            action=int(self.actions[agent, t]),
            log_prob=float(self.log_probs[agent, t]),
            agent=agent,
            time_index=int(self.time_indices[t]),
        )

    def with_advantages(self, advantage: AdvantageBatch) -> 'RolloutBatch':
        return replace(self, advantage=advantage)

    def subset(self, indices: np.ndarray) -> 'RolloutBatch':
        """Batch restricted to the given time indices (episode returns are kept)."""
        idx = np.asarray(indices, dtype=np.int64)
        advantage = None
        if self.advantage is not None:
            advantage = AdvantageBatch(
                deltas=self.advantage.deltas[idx],
                advantages=self.advantage.advantages[idx],
                returns=self.advantage.returns[idx],
                episode_ends=self.advantage.episode_ends[idx],
            )
        return RolloutBatch(
            observations=[obs[idx] for obs in self.observations],
            actions=self.actions[:, idx],
            log_probs=self.log_probs[:, idx],
            rewards=self.rewards[idx],
            terminals=self.terminals[idx],
            truncations=self.truncations[idx],
            time_indices=self.time_indices[idx],
            values_old=self.values_old[idx],
            next_values=self.next_values[idx],
            state_ids=None if self.state_ids is None else self.state_ids[idx],
            state_features=None if self.state_features is None else self.state_features[idx],
            advantage=advantage,
            episode_returns=self.episode_returns,
        )
