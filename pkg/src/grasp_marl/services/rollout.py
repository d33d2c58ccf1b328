"""
Rollout Collection

Samples episodes under frozen policy and critic snapshots, then computes
TD errors, GAE advantages and return targets from the global critic.
Episodes fan out over worker threads; each worker owns one environment
instance, every episode draws from streams keyed by (iteration, episode), and
results are merged in episode order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import psutil

from ..core.envs import CooperativeEnv, make_env
from ..core.estimation import Critic, gae, normalize_advantages, return_targets, td_errors
from ..core.numerics import RngStream
from ..core.policy import Policy, PolicyParams
from ..models.config import TrainConfig
from ..models.rollout import AdvantageBatch, RolloutBatch
from ..utils.constants import POLICY_TABULAR, STREAM_ACT, STREAM_ENV
from ..utils.exceptions import EmptyBatchError
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class EpisodeTrace:
    """One sampled episode before advantage estimation."""

    observations: List[List[object]] = field(default_factory=list)
    actions: List[List[int]] = field(default_factory=list)
    log_probs: List[List[float]] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    terminals: List[bool] = field(default_factory=list)
    truncations: List[bool] = field(default_factory=list)
    state_ids: List[Optional[int]] = field(default_factory=list)
    state_features: List[np.ndarray] = field(default_factory=list)
    final_state_id: Optional[int] = None
    final_state_features: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.rewards)

    @property
    def ends_in_terminal(self) -> bool:
        return bool(self.terminals) and self.terminals[-1]


def resolve_workers(requested: int) -> int:
    """``0`` means one worker per physical core."""
    if requested > 0:
        return requested
    return max(1, psutil.cpu_count(logical=False) or 1)


def run_episode(env: CooperativeEnv, policy: Policy, params: PolicyParams, root: RngStream,
                iteration: int, episode: int) -> EpisodeTrace:
    """Play one episode to termination or truncation."""
    env_rng = root.spawn(STREAM_ENV, iteration, episode)
    act_rng = root.spawn(STREAM_ACT, iteration, episode)
    n_agents = env.spec.n_agents
    trace = EpisodeTrace(observations=[[] for _ in range(n_agents)],
                         actions=[[] for _ in range(n_agents)],
                         log_probs=[[] for _ in range(n_agents)])

    observations = env.reset(env_rng)
    for _ in range(env.spec.max_episode_length):
        state_id, features = env.global_state()
        joint_action = []
        for agent in range(n_agents):
            action, logp = policy.act(observations[agent], agent, params, act_rng)
            trace.observations[agent].append(observations[agent])
            trace.actions[agent].append(action)
            trace.log_probs[agent].append(logp)
            joint_action.append(action)
        result = env.step(joint_action)
        trace.rewards.append(float(result.reward))
        trace.terminals.append(bool(result.terminal))
        trace.truncations.append(result.truncated)
        trace.state_ids.append(state_id)
        trace.state_features.append(np.asarray(features, dtype=np.float64))
        observations = result.observations
        if result.terminal or result.truncated:
            break
    else:
        # step limit reached without the env flagging it
        trace.truncations[-1] = True

    trace.final_state_id, final_features = env.global_state()
    trace.final_state_features = np.asarray(final_features, dtype=np.float64)
    return trace


def _critic_states(critic: Critic, ids: Sequence[Optional[int]], features: Sequence[np.ndarray]):
    if critic.family == POLICY_TABULAR:
        return np.asarray(ids, dtype=np.int64)
    return np.stack(features)


def estimate_episode(trace: EpisodeTrace, critic: Critic, phi: np.ndarray, gamma: float,
                     lam: float) -> Tuple[np.ndarray, np.ndarray, AdvantageBatch]:
    """``(values_old, next_values, advantages)`` of one episode under the critic snapshot."""
    values = critic.values(phi, _critic_states(critic, trace.state_ids, trace.state_features))
    bootstrap = 0.0
    if not trace.ends_in_terminal:
        final = critic.values(phi, _critic_states(critic, [trace.final_state_id], [trace.final_state_features]))
        bootstrap = float(final[0])
    extended = np.append(values, bootstrap)
    terminals = np.asarray(trace.terminals, dtype=bool)
    deltas = td_errors(trace.rewards, extended, terminals, gamma)
    advantages = gae(deltas, gamma, lam, terminals)
    ends = np.zeros(len(trace), dtype=bool)
    ends[-1] = True
    next_values = np.where(terminals, 0.0, extended[1:])
    batch = AdvantageBatch(deltas=deltas, advantages=advantages,
                           returns=return_targets(advantages, values), episode_ends=ends)
    return values, next_values, batch


def _concat_observations(traces: Sequence[EpisodeTrace], agent: int) -> np.ndarray:
    rows = [obs for trace in traces for obs in trace.observations[agent]]
    first = np.asarray(rows[0])
    if first.ndim == 0:
        return np.asarray(rows, dtype=np.int64 if np.issubdtype(first.dtype, np.integer) else np.float64)
    return np.stack([np.asarray(r, dtype=np.float64) for r in rows])


def assemble_batch(traces: Sequence[EpisodeTrace], critic: Critic, phi: np.ndarray,
                   config: TrainConfig) -> RolloutBatch:
    """Merge episodes (in the given order) into one batch with advantages populated."""
    if not traces:
        raise EmptyBatchError("Rollout batch needs at least one episode")
    n_agents = len(traces[0].actions)
    values, next_values, parts = [], [], []
    for trace in traces:
        v, nv, adv = estimate_episode(trace, critic, phi, config.gamma, config.gae_lambda)
        values.append(v)
        next_values.append(nv)
        parts.append(adv)

    advantages = np.concatenate([p.advantages for p in parts])
    returns = np.concatenate([p.returns for p in parts])
    if config.advantage_normalization:
        advantages = normalize_advantages(advantages)
    advantage = AdvantageBatch(
        deltas=np.concatenate([p.deltas for p in parts]),
        advantages=advantages,
        returns=returns,
        episode_ends=np.concatenate([p.episode_ends for p in parts]),
    )

    all_ids = [sid for trace in traces for sid in trace.state_ids]
    return RolloutBatch(
        observations=[_concat_observations(traces, agent) for agent in range(n_agents)],
        actions=np.array([[a for trace in traces for a in trace.actions[agent]] for agent in range(n_agents)],
                         dtype=np.int64),
        log_probs=np.array([[lp for trace in traces for lp in trace.log_probs[agent]]
                            for agent in range(n_agents)], dtype=np.float64),
        rewards=np.array([r for trace in traces for r in trace.rewards], dtype=np.float64),
        terminals=np.array([d for trace in traces for d in trace.terminals], dtype=bool),
        truncations=np.array([d for trace in traces for d in trace.truncations], dtype=bool),
        time_indices=np.concatenate([np.arange(len(trace)) for trace in traces]).astype(np.int64),
        values_old=np.concatenate(values),
        next_values=np.concatenate(next_values),
        state_ids=None if any(sid is None for sid in all_ids) else np.asarray(all_ids, dtype=np.int64),
        state_features=np.stack([f for trace in traces for f in trace.state_features]),
        advantage=advantage,
        episode_returns=np.array([sum(trace.rewards) for trace in traces], dtype=np.float64),
    )


def collect_rollouts(policy: Policy, params: PolicyParams, critic: Critic, phi: np.ndarray,
                     config: TrainConfig, root: RngStream, iteration: int = 0,
                     n_episodes: Optional[int] = None,
                     env_factory: Optional[Callable[[], CooperativeEnv]] = None) -> RolloutBatch:
    """
    Sample ``n_episodes`` (default ``config.episodes_per_iteration``) episodes.

    The snapshots ``params`` and ``phi`` are only read, so the batch depends
    on the seed, the iteration and the snapshots, never on thread scheduling.

    Raises:
        EmptyBatchError: zero episodes requested
    """
    n_episodes = config.episodes_per_iteration if n_episodes is None else n_episodes
    if n_episodes < 1:
        raise EmptyBatchError("Rollout collection needs at least one episode")
    factory = env_factory or (lambda: make_env(config))
    workers = min(resolve_workers(config.rollout_workers), n_episodes)
    chunks = [chunk for chunk in np.array_split(np.arange(n_episodes), workers) if chunk.size]

    def run_chunk(episodes: np.ndarray) -> List[EpisodeTrace]:
        env = factory()
        return [run_episode(env, policy, params, root, iteration, int(e)) for e in episodes]

    if len(chunks) == 1:
        results = [run_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run_chunk, chunks))
    traces = [trace for chunk in results for trace in chunk]
    logger.debug(f"Iteration {iteration}: collected {len(traces)} episodes on {len(chunks)} worker(s)")
    return assemble_batch(traces, critic, phi, config)
