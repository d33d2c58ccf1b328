"""
Policy Gradients

Monte-Carlo local policy gradients, their finite-difference certification,
and the clipped surrogate with ratios recomputed from current parameters.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ...models.rollout import RolloutBatch
from ...utils.exceptions import EmptyBatchError
from .networks import Policy
from .params import PolicyParams


@dataclass(eq=False)
class SurrogateResult:
    """Clipped surrogate value of one agent and its ascent gradient split by block."""

    value: float
    head_gradient: np.ndarray
    backbone_gradient: np.ndarray
    clip_fraction: float
    ratios: np.ndarray


def _require_samples(batch: RolloutBatch):
    if batch.size == 0:
        raise EmptyBatchError("Rollout batch has no samples")


def local_policy_gradient_parts(policy: Policy, batch: RolloutBatch, agent: int,
                                params: PolicyParams) -> Tuple[np.ndarray, np.ndarray]:
    """``mean_t grad log pi(a_t|o_t) * A_t`` split into (head block, backbone block)."""
    _require_samples(batch)
    weights = batch.advantages / batch.size
    full = policy.weighted_score(batch.observations[agent], batch.actions[agent], agent, params, weights)
    return full[params.head_slice(agent)].copy(), full[params.backbone_slice()].copy()


def local_policy_gradient(policy: Policy, batch: RolloutBatch, agent: int,
                          params: PolicyParams) -> np.ndarray:
    """
    Vanilla policy gradient of one agent restricted to its head block.

    Raises:
        EmptyBatchError: the batch holds no samples
    """
    return local_policy_gradient_parts(policy, batch, agent, params)[0]


FD_RESOLUTION = 1e7
FD_ABSOLUTE_FLOOR = 1e-8


def finite_difference_check(policy: Policy, params: PolicyParams, batch: RolloutBatch,
                            agent: int, h: float = 1e-5) -> float:
    """
    Maximum relative error between the analytic gradient and central differences.

    Covers the agent's head block and the shared backbone block. The numeric
    derivative is the central difference of ``mean_t log pi(a_t|o_t) * A_t``,
    taken per sample so unaffected samples cancel exactly. Per coordinate the
    error is ``|a - n| / max(|a|, |n|, floor)``. The floor is where float64
    rounding of the log-probabilities (about ``eps * |log pi| * |A| / h``)
    reaches one part in ``FD_RESOLUTION``, and never below 1e-8.
    """
    if h <= 0:
        raise ValueError("h must be > 0")
    head_gradient, backbone_gradient = local_policy_gradient_parts(policy, batch, agent, params)
    analytic = np.concatenate([head_gradient, backbone_gradient])
    if not analytic.size:
        return 0.0

    head, backbone = params.head_slice(agent), params.backbone_slice()
    indices = list(range(head.start, head.stop)) + list(range(backbone.start, backbone.stop))
    obs, acts, adv = batch.observations[agent], batch.actions[agent], batch.advantages
    shifted = params.copy()
    numeric = np.zeros_like(analytic)
    for k, index in enumerate(indices):
        original = shifted.flat[index]
        shifted.flat[index] = original + h
        up = policy.log_probs(obs, acts, agent, shifted)
        shifted.flat[index] = original - h
        down = policy.log_probs(obs, acts, agent, shifted)
        shifted.flat[index] = original
        numeric[k] = float(np.mean((up - down) * adv)) / (2.0 * h)

    base = policy.log_probs(obs, acts, agent, params)
    magnitude = float(np.mean(np.abs(adv))) * max(1.0, float(np.max(np.abs(base))))
    floor = max(FD_ABSOLUTE_FLOOR, FD_RESOLUTION * float(np.finfo(np.float64).eps) * magnitude / h)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def surrogate_and_gradient(policy: Policy, params: PolicyParams, batch: RolloutBatch, agent: int,
                           epsilon: float, indices: Optional[np.ndarray] = None) -> SurrogateResult:
    """
    Clipped surrogate ``mean_t min(rho_t A_t, clip(rho_t, 1-eps, 1+eps) A_t)``.

    ``rho_t`` is recomputed from ``params`` against the stored behaviour
    log-probabilities. A sample contributes ``A_t grad rho_t`` only where the
    unclipped term attains the minimum; where the clipped term is strictly
    smaller its gradient is zero.
    """
    if indices is not None:
        batch = batch.subset(indices)
    _require_samples(batch)

    obs, acts = batch.observations[agent], batch.actions[agent]
    adv = batch.advantages
    ratios = np.exp(policy.log_probs(obs, acts, agent, params) - batch.log_probs[agent])
    clipped = np.clip(ratios, 1.0 - epsilon, 1.0 + epsilon)
    unclipped_term = ratios * adv
    clipped_term = clipped * adv
    value = float(np.mean(np.minimum(unclipped_term, clipped_term)))

    active = unclipped_term <= clipped_term
    weights = np.where(active, adv * ratios, 0.0) / batch.size
    full = policy.weighted_score(obs, acts, agent, params, weights)
    return SurrogateResult(
        value=value,
        head_gradient=full[params.head_slice(agent)].copy(),
        backbone_gradient=full[params.backbone_slice()].copy(),
        clip_fraction=float(np.mean(~active)),
        ratios=ratios,
    )
