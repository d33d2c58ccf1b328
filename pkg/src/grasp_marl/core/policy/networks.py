"""
Policy Networks

Tabular softmax policies and a shared tanh backbone with per-agent softmax
heads. Both expose batched forward passes and exact score-function gradients
``sum_t w_t * grad log pi(a_t | o_t)`` over the full flat parameter vector.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from ...utils.constants import DEFAULT_HIDDEN_WIDTH, DEFAULT_INIT_SCALE, POLICY_MLP, POLICY_TABULAR
from ...utils.exceptions import DimensionMismatchError, InvalidActionError, UnknownObservationError
from ..numerics import RngStream
from .params import ParamLayout, PolicyParams


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shifted by the row maximum."""
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits, axis=-1, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=-1, keepdims=True))


@dataclass(frozen=True, eq=False)
class ActionDistribution:
    """Categorical distribution over an agent's actions."""

    probabilities: np.ndarray

    @property
    def n_actions(self) -> int:
        return int(self.probabilities.size)

    def log_prob(self, action: int) -> float:
        return float(np.log(self.probabilities[action]))

    def sample(self, rng: RngStream) -> int:
        return rng.choice(self.n_actions, self.probabilities)

    @property
    def greedy_action(self) -> int:
        return int(np.argmax(self.probabilities))


class Policy(ABC):
    """A family of per-agent categorical policies over a shared parameter vector."""

    family: str = ""

    def __init__(self, n_agents: int, n_actions: int):
        if n_agents < 1 or n_actions < 1:
            raise ValueError("n_agents and n_actions must be >= 1")
        self.n_agents = n_agents
        self.n_actions = n_actions
        self.layout = self._build_layout()

    @abstractmethod
    def _build_layout(self) -> ParamLayout:
        """Block layout: backbone blocks first, then heads in agent order."""

    @abstractmethod
    def init_params(self, rng: RngStream) -> PolicyParams:
        """Initial parameters drawn from ``rng``."""

    @abstractmethod
    def logits(self, observations: Any, agent: int, params: PolicyParams) -> np.ndarray:
        """``(T, A)`` logits for a batch of observations."""

    @abstractmethod
    def weighted_score(self, observations: Any, actions: np.ndarray, agent: int,
                       params: PolicyParams, weights: np.ndarray) -> np.ndarray:
        """``sum_t weights[t] * grad log pi(actions[t] | observations[t])`` as a flat vector."""

    @abstractmethod
    def single(self, obs: Any) -> Any:
        """Wrap one observation as a batch of one."""

    def probabilities(self, observations: Any, agent: int, params: PolicyParams) -> np.ndarray:
        return softmax(self.logits(observations, agent, params))

    def log_probs(self, observations: Any, actions: np.ndarray, agent: int, params: PolicyParams) -> np.ndarray:
        actions = self._check_actions(actions)
        logp = log_softmax(self.logits(observations, agent, params))
        return logp[np.arange(actions.size), actions]

    def action_distribution(self, obs: Any, agent: int, params: PolicyParams) -> ActionDistribution:
        return ActionDistribution(self.probabilities(self.single(obs), agent, params)[0])

    def act(self, obs: Any, agent: int, params: PolicyParams, rng: RngStream) -> Tuple[int, float]:
        """Sample an action and return it with its log-probability."""
        batch = self.single(obs)
        logp = log_softmax(self.logits(batch, agent, params))[0]
        action = rng.choice(self.n_actions, np.exp(logp))
        return action, float(logp[action])

    def logprob_grad(self, obs: Any, action: int, agent: int, params: PolicyParams) -> np.ndarray:
        """Exact ``grad log pi(action | obs)`` over all parameters (zero outside this agent's head and the backbone)."""
        return self.weighted_score(self.single(obs), np.array([action]), agent, params, np.ones(1))

    def _check_actions(self, actions: Any) -> np.ndarray:
        acts = np.asarray(actions, dtype=np.int64).reshape(-1)
        if acts.size and (acts.min() < 0 or acts.max() >= self.n_actions):
            raise InvalidActionError(f"Actions must lie in [0, {self.n_actions})")
        return acts

    def _check_agent(self, agent: int):
        if not 0 <= agent < self.n_agents:
            raise ValueError(f"Agent id {agent} outside [0, {self.n_agents})")


class TabularSoftmaxPolicy(Policy):
    """One logit row per discrete observation and agent; no backbone."""

    family = POLICY_TABULAR

    def __init__(self, n_agents: int, n_observations: int, n_actions: int):
        self.n_observations = n_observations
        super().__init__(n_agents, n_actions)

    def _build_layout(self) -> ParamLayout:
        return ParamLayout.from_pairs(
            [(f"head{i}/logits", (self.n_observations, self.n_actions)) for i in range(self.n_agents)]
        )

    def init_params(self, rng: RngStream) -> PolicyParams:
        return PolicyParams.zeros(self.layout, self.n_agents)

    def single(self, obs: Any) -> np.ndarray:
        return np.asarray([obs])

    def _obs_ids(self, observations: Any) -> np.ndarray:
        arr = np.asarray(observations)
        if arr.ndim != 1 or not np.issubdtype(arr.dtype, np.integer):
            raise UnknownObservationError("Tabular policies take integer observation ids")
        if arr.size and (arr.min() < 0 or arr.max() >= self.n_observations):
            raise UnknownObservationError(f"Observation ids must lie in [0, {self.n_observations})")
        return arr.astype(np.int64)

    def logits(self, observations: Any, agent: int, params: PolicyParams) -> np.ndarray:
        self._check_agent(agent)
        return params.block(f"head{agent}/logits")[self._obs_ids(observations)]

    def weighted_score(self, observations, actions, agent, params, weights) -> np.ndarray:
        obs = self._obs_ids(observations)
        acts = self._check_actions(actions)
        probs = self.probabilities(obs, agent, params)
        score = -probs
        score[np.arange(acts.size), acts] += 1.0
        table = np.zeros((self.n_observations, self.n_actions))
        np.add.at(table, obs, np.asarray(weights, dtype=np.float64)[:, None] * score)
        grad = np.zeros(self.layout.size)
        grad[self.layout.slice(f"head{agent}/logits")] = table.reshape(-1)
        return grad


class SharedMlpPolicy(Policy):
    """
    ``h = tanh(x W1 + b1)`` shared by every agent, then ``softmax(h W_i + b_i)``.

    Integer observations are one-hot encoded when ``n_observations`` is set.
    """

    family = POLICY_MLP

    def __init__(self, n_agents: int, input_dim: int, n_actions: int,
                 hidden_width: int = DEFAULT_HIDDEN_WIDTH, n_observations: Optional[int] = None,
                 init_scale: float = DEFAULT_INIT_SCALE):
        self.input_dim = input_dim
        self.hidden_width = hidden_width
        self.n_observations = n_observations
        self.init_scale = init_scale
        super().__init__(n_agents, n_actions)

    def _build_layout(self) -> ParamLayout:
        F, H, A = self.input_dim, self.hidden_width, self.n_actions
        pairs = [("backbone/W", (F, H)), ("backbone/b", (H,))]
        for i in range(self.n_agents):
            pairs += [(f"head{i}/W", (H, A)), (f"head{i}/b", (A,))]
        return ParamLayout.from_pairs(pairs)

    def init_params(self, rng: RngStream) -> PolicyParams:
        flat = rng.uniform(-self.init_scale, self.init_scale, self.layout.size)
        return PolicyParams(self.layout, flat, self.n_agents)

    def single(self, obs: Any) -> np.ndarray:
        arr = np.asarray(obs)
        return arr[None] if arr.ndim <= 1 else arr

    def encode(self, observations: Any) -> np.ndarray:
        """``(T, F)`` float features from ids or feature rows."""
        arr = np.asarray(observations)
        if arr.ndim == 1 and np.issubdtype(arr.dtype, np.integer):
            if self.n_observations is None:
                raise UnknownObservationError("This policy takes feature vectors, not observation ids")
            if arr.size and (arr.min() < 0 or arr.max() >= self.n_observations):
                raise UnknownObservationError(f"Observation ids must lie in [0, {self.n_observations})")
            return np.eye(self.n_observations)[arr]
        if arr.ndim == 2 and np.issubdtype(arr.dtype, np.integer) and arr.shape[1] == 1 and self.n_observations:
            return self.encode(arr[:, 0])
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != self.input_dim:
            raise DimensionMismatchError([0], [arr.shape[-1] if arr.ndim else 0],
                                         f"observation features vs input width {self.input_dim}")
        return arr

    def _forward(self, observations: Any, agent: int, params: PolicyParams):
        self._check_agent(agent)
        x = self.encode(observations)
        h = np.tanh(x @ params.block("backbone/W") + params.block("backbone/b"))
        logits = h @ params.block(f"head{agent}/W") + params.block(f"head{agent}/b")
        return x, h, logits

    def logits(self, observations: Any, agent: int, params: PolicyParams) -> np.ndarray:
        return self._forward(observations, agent, params)[2]

    def weighted_score(self, observations, actions, agent, params, weights) -> np.ndarray:
        acts = self._check_actions(actions)
        x, h, logits = self._forward(observations, agent, params)
        probs = softmax(logits)
        E = -probs
        E[np.arange(acts.size), acts] += 1.0
        E *= np.asarray(weights, dtype=np.float64)[:, None]

        grad = np.zeros(self.layout.size)
        W = params.block(f"head{agent}/W")
        grad[self.layout.slice(f"head{agent}/W")] = (h.T @ E).reshape(-1)
        grad[self.layout.slice(f"head{agent}/b")] = E.sum(axis=0)
        dz = (E @ W.T) * (1.0 - h * h)
        grad[self.layout.slice("backbone/W")] = (x.T @ dz).reshape(-1)
        grad[self.layout.slice("backbone/b")] = dz.sum(axis=0)
        return grad
