"""
Global Critic

Tabular and MLP state-value functions over flat parameter vectors, the
value-clipped critic loss and the critic update step.
"""

from abc import ABC, abstractmethod
from typing import Any, Optional, Tuple

import numpy as np

from ...models.rollout import RolloutBatch
from ...utils.constants import DEFAULT_CRITIC_HIDDEN_WIDTH, DEFAULT_INIT_SCALE, POLICY_MLP, POLICY_TABULAR
from ...utils.exceptions import DimensionMismatchError, EmptyBatchError, UnknownObservationError
from ..numerics import RngStream
from ..optimizers import Optimizer
from ..policy.params import ParamLayout


class Critic(ABC):
    """``V(s; phi)`` with an exact vector-Jacobian product."""

    family: str = ""
    layout: ParamLayout

    @abstractmethod
    def init_params(self, rng: RngStream) -> np.ndarray:
        """Initial flat parameters."""

    @abstractmethod
    def inputs(self, batch: RolloutBatch) -> Any:
        """The batch fields this critic reads (state ids or state features)."""

    @abstractmethod
    def values(self, phi: np.ndarray, states: Any) -> np.ndarray:
        """``(T,)`` values."""

    @abstractmethod
    def backward(self, phi: np.ndarray, states: Any, dvalues: np.ndarray) -> np.ndarray:
        """``sum_t dvalues[t] * grad_phi V(s_t)``."""


class TabularCritic(Critic):
    """One value per enumerable global state, initialised to zero."""

    family = POLICY_TABULAR

    def __init__(self, n_states: int):
        if n_states < 1:
            raise ValueError("Tabular critic needs at least one state")
        self.n_states = n_states
        self.layout = ParamLayout.from_pairs([("values", (n_states,))])

    def init_params(self, rng: Optional[RngStream] = None) -> np.ndarray:
        return np.zeros(self.n_states)

    def inputs(self, batch: RolloutBatch) -> np.ndarray:
        if batch.state_ids is None:
            raise UnknownObservationError("Batch has no enumerable state ids for a tabular critic")
        return batch.state_ids

    def _ids(self, states: Any) -> np.ndarray:
        ids = np.asarray(states, dtype=np.int64).reshape(-1)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n_states):
            raise UnknownObservationError(f"State ids must lie in [0, {self.n_states})")
        return ids

    def values(self, phi: np.ndarray, states: Any) -> np.ndarray:
        return phi[self._ids(states)]

    def backward(self, phi: np.ndarray, states: Any, dvalues: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(phi)
        np.add.at(grad, self._ids(states), np.asarray(dvalues, dtype=np.float64))
        return grad


class MlpCritic(Critic):
    """State features -> two ReLU layers -> scalar."""

    family = POLICY_MLP

    def __init__(self, state_dim: int, hidden_width: int = DEFAULT_CRITIC_HIDDEN_WIDTH,
                 init_scale: float = DEFAULT_INIT_SCALE):
        self.state_dim = state_dim
        self.hidden_width = hidden_width
        self.init_scale = init_scale
        H = hidden_width
        self.layout = ParamLayout.from_pairs([
            ("W1", (state_dim, H)), ("b1", (H,)),
            ("W2", (H, H)), ("b2", (H,)),
            ("W3", (H, 1)), ("b3", (1,)),
        ])

    def init_params(self, rng: RngStream) -> np.ndarray:
        return rng.uniform(-self.init_scale, self.init_scale, self.layout.size)

    def inputs(self, batch: RolloutBatch) -> np.ndarray:
        if batch.state_features is None:
            raise UnknownObservationError("Batch has no state features for an MLP critic")
        return batch.state_features

    def _unpack(self, phi: np.ndarray):
        return {name: phi[self.layout.slice(name)].reshape(self.layout.shape(name))
                for name in self.layout.names}

    def _forward(self, phi: np.ndarray, states: Any):
        x = np.asarray(states, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.state_dim:
            raise DimensionMismatchError([0], [x.shape[-1] if x.ndim else 0],
                                         f"state features vs critic input width {self.state_dim}")
        p = self._unpack(phi)
        z1 = x @ p["W1"] + p["b1"]
        h1 = np.maximum(z1, 0.0)
        z2 = h1 @ p["W2"] + p["b2"]
        h2 = np.maximum(z2, 0.0)
        v = (h2 @ p["W3"] + p["b3"])[:, 0]
        return p, x, z1, h1, z2, h2, v

    def values(self, phi: np.ndarray, states: Any) -> np.ndarray:
        return self._forward(phi, states)[-1]

    def backward(self, phi: np.ndarray, states: Any, dvalues: np.ndarray) -> np.ndarray:
        p, x, z1, h1, z2, h2, _ = self._forward(phi, states)
        dv = np.asarray(dvalues, dtype=np.float64)[:, None]
        grads = {
            "W3": h2.T @ dv,
            "b3": dv.sum(axis=0),
        }
        dz2 = (dv @ p["W3"].T) * (z2 > 0)
        grads["W2"] = h1.T @ dz2
        grads["b2"] = dz2.sum(axis=0)
        dz1 = (dz2 @ p["W2"].T) * (z1 > 0)
        grads["W1"] = x.T @ dz1
        grads["b1"] = dz1.sum(axis=0)

        flat = np.zeros_like(phi)
        for name, g in grads.items():
            flat[self.layout.slice(name)] = g.reshape(-1)
        return flat


def critic_loss(critic: Critic, phi: np.ndarray, batch: RolloutBatch, epsilon: float) -> Tuple[float, np.ndarray]:
    """
    Value-clipped squared error and its gradient with respect to ``phi``.

    ``mean_t max((V - R)^2, (clip(V, V_old - eps, V_old + eps) - R)^2)`` where
    ``V_old`` are the behaviour-time values stored in the batch. Ties at the
    max take the unclipped branch.

    Raises:
        EmptyBatchError: the batch holds no samples
    """
    if batch.size == 0:
        raise EmptyBatchError("Critic loss needs at least one sample")
    states = critic.inputs(batch)
    v = critic.values(phi, states)
    returns = batch.returns
    unclipped = v - returns
    clipped = np.clip(v, batch.values_old - epsilon, batch.values_old + epsilon) - returns
    sq_u = unclipped * unclipped
    sq_c = clipped * clipped
    loss = float(np.mean(np.maximum(sq_u, sq_c)))
    # a strictly larger clipped branch means V sits outside the band, where it is constant
    dvalues = np.where(sq_u >= sq_c, 2.0 * unclipped, 0.0) / batch.size
    return loss, critic.backward(phi, states, dvalues)


def critic_update(phi: np.ndarray, gradient: np.ndarray, eta: float,
                  optimizer: Optional[Optimizer] = None) -> np.ndarray:
    """
    One descent step on the critic parameters.

    Plain mode (``optimizer`` None) returns ``phi - eta * gradient``; otherwise
    the optimizer's own step (and learning rate) is used.
    """
    if optimizer is None:
        if eta <= 0:
            raise ValueError("eta must be > 0")
        return phi - eta * gradient
    return optimizer.step(phi, gradient)
