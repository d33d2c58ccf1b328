"""
Trainer

Consensus-gradient multi-agent PPO. Each iteration collects rollouts under
frozen snapshots, computes per-agent vanilla gradients and the consensus
direction once, then runs the clipped-surrogate actor epochs with the
consensus term added to every head block, and the value-clipped critic
epochs. The team-quadratic preset runs the same head-block rule on exact
gradients.
"""

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from ..core.consensus import (
    equilibrium_check, geometric_aligned_direction, kkt_margin, solve_consensus_qp
)
from ..core.envs import EnvSpec, TeamQuadratic, make_env, make_team_quadratic
from ..core.estimation import Critic, MlpCritic, TabularCritic, critic_loss, critic_update
from ..core.numerics import RngStream, norm_sq
from ..core.optimizers import Optimizer, make_optimizer
from ..core.policy import (
    ParamLayout, Policy, PolicyParams, SharedMlpPolicy, TabularSoftmaxPolicy, local_policy_gradient,
    surrogate_and_gradient, write_checkpoint
)
from ..models.config import RunConfig, TrainConfig
from ..models.consensus import ConsensusOutcome, GradientSet
from ..models.metrics import IterationMetrics
from ..models.rollout import RolloutBatch
from ..utils.constants import (
    CHECKPOINT_DIR, ENV_TEAM_QUADRATIC, MAX_TABULAR_OBSERVATIONS, MODE_ALIGNED, POLICY_TABULAR,
    STREAM_INIT, STREAM_MINIBATCH
)
from ..utils.exceptions import ConfigError, DimensionMismatchError, NonFiniteError, NumericAbort
from ..utils.logger import get_logger, log_iteration
from .config_manager import ConfigManager
from .metrics_writer import MetricsWriter
from .rollout import collect_rollouts

logger = get_logger(__name__)

# init sub-streams
_INIT_POLICY = 0
_INIT_CRITIC = 1
_INIT_THETA = 2


@dataclass
class ActorStats:
    """Final-epoch averages of one actor update."""

    surrogate: float
    clip_fraction: float


def build_policy(config: TrainConfig, spec: EnvSpec) -> Policy:
    """Policy family named by the configuration, sized for the environment."""
    if config.policy == POLICY_TABULAR:
        if not spec.tabular:
            raise ConfigError("policy", "must be \"mlp\" when observations are not enumerable")
        if spec.n_observations > MAX_TABULAR_OBSERVATIONS:
            raise ConfigError("policy", f"tabular needs at most {MAX_TABULAR_OBSERVATIONS} observations")
        return TabularSoftmaxPolicy(spec.n_agents, spec.n_observations, spec.n_actions)
    input_dim = spec.n_observations if spec.tabular else spec.observation_dim
    return SharedMlpPolicy(spec.n_agents, input_dim, spec.n_actions, config.hidden_width,
                           n_observations=spec.n_observations)


def build_critic(config: TrainConfig, spec: EnvSpec) -> Critic:
    if config.critic == POLICY_TABULAR:
        if spec.n_states is None:
            raise ConfigError("critic", "must be \"mlp\" when global states are not enumerable")
        return TabularCritic(spec.n_states)
    return MlpCritic(spec.state_dim, config.critic_hidden_width)


def minibatch_indices(size: int, minibatches: int, root: Optional[RngStream],
                      iteration: int, epoch: int) -> List[np.ndarray]:
    """
    Split ``range(size)`` into ``minibatches`` nearly equal parts.

    A single minibatch keeps time order; otherwise indices are shuffled by
    the stream keyed by (iteration, epoch).
    """
    if minibatches <= 1 or root is None:
        return [np.arange(size)]
    order = root.spawn(STREAM_MINIBATCH, iteration, epoch).permutation(size)
    return [part for part in np.array_split(order, minibatches) if part.size]


def local_gradients(batch: RolloutBatch, policy: Policy, params: PolicyParams) -> GradientSet:
    """Head-block vanilla policy gradient of every agent."""
    return GradientSet.from_vectors(
        [local_policy_gradient(policy, batch, agent, params) for agent in range(batch.n_agents)]
    )


def zero_consensus(gradients: GradientSet, solver: str) -> ConsensusOutcome:
    """Outcome used when the consensus term is switched off."""
    n = gradients.n_agents
    return ConsensusOutcome(u_star=np.zeros(gradients.dimension), weights=np.full(n, 1.0 / n),
                            iterations=0, objective=0.0, converged=True, gap=0.0, solver=solver)


def compute_consensus(batch: RolloutBatch, policy: Policy, params: PolicyParams,
                      config: TrainConfig) -> Tuple[GradientSet, ConsensusOutcome]:
    """
    Per-agent local gradients and the consensus direction u* over them.

    Raises:
        NonFiniteError: a gradient contains NaN or Inf
    """
    gradients = local_gradients(batch, policy, params)
    outcome = solve_consensus_qp(gradients, tol=config.consensus_tol, max_iter=config.consensus_max_iter,
                                 solver=config.consensus_solver)
    return gradients, outcome


def _head_direction(config: TrainConfig, surrogate_head: np.ndarray, g_i: np.ndarray,
                    u_star: np.ndarray) -> np.ndarray:
    coefficient = config.effective_coefficient
    if coefficient == 0.0:
        return surrogate_head
    u = coefficient * u_star
    if config.mode == MODE_ALIGNED:
        if norm_sq(g_i) + norm_sq(u) == 0.0:
            return np.zeros_like(g_i)
        return geometric_aligned_direction(g_i, u)
    return surrogate_head + u


def _require_finite(values: np.ndarray, quantity: str, iteration: int):
    if not np.all(np.isfinite(values)):
        raise NumericAbort(quantity, iteration)


def ppo_actor_update(policy: Policy, params: PolicyParams, batch: RolloutBatch, u_star: np.ndarray,
                     config: TrainConfig, optimizer: Optimizer, gradients: Optional[GradientSet] = None,
                     root: Optional[RngStream] = None, iteration: int = 0) -> Tuple[PolicyParams, ActorStats]:
    """
    Multi-epoch clipped-surrogate ascent with the consensus term on head blocks.

    Every minibatch recomputes the ratios from the current parameters. Head
    block ``i`` ascends ``grad J_i^clip + coefficient * u*`` (or the aligned
    direction ``Gamma_i (g_i + coefficient * u*)`` in ``grasp_aligned``
    mode); the backbone ascends the sum of the agents' surrogate gradients.
    The direction is negated before it reaches the descending optimizer.

    Raises:
        DimensionMismatchError: ``u_star`` does not match the head-block dimension
        NumericAbort: a non-finite direction or parameter
    """
    u_star = np.asarray(u_star, dtype=np.float64).reshape(-1)
    if u_star.size != params.head_dimension:
        raise DimensionMismatchError([0], [u_star.size], f"u* vs head dimension {params.head_dimension}")
    if config.mode == MODE_ALIGNED and gradients is None:
        gradients = local_gradients(batch, policy, params)

    backbone = params.backbone_slice()
    surrogates: List[float] = []
    clipped: List[float] = []
    for epoch in range(config.ppo_epochs):
        surrogates, clipped = [], []
        for indices in minibatch_indices(batch.size, config.minibatches, root, iteration, epoch):
            direction = np.zeros(params.layout.size)
            for agent in range(batch.n_agents):
                result = surrogate_and_gradient(policy, params, batch, agent, config.clip_epsilon, indices)
                g_i = gradients[agent] if gradients is not None else result.head_gradient
                direction[params.head_slice(agent)] = _head_direction(config, result.head_gradient, g_i, u_star)
                direction[backbone] += result.backbone_gradient
                surrogates.append(result.value)
                clipped.append(result.clip_fraction)
            _require_finite(direction, "actor update direction", iteration)
            params = params.with_flat(optimizer.step(params.flat, -direction))
            _require_finite(params.flat, "policy parameters", iteration)
    return params, ActorStats(float(np.mean(surrogates)), float(np.mean(clipped)))


def ppo_critic_update(critic: Critic, phi: np.ndarray, batch: RolloutBatch, config: TrainConfig,
                      optimizer: Optional[Optimizer] = None, root: Optional[RngStream] = None,
                      iteration: int = 0) -> Tuple[np.ndarray, float]:
    """
    Value-clipped critic epochs; returns the new parameters and the final-epoch mean loss.

    With ``optimizer`` None the step is plain ``phi - critic_learning_rate * grad``.
    """
    losses: List[float] = []
    for epoch in range(config.ppo_epochs):
        losses = []
        for indices in minibatch_indices(batch.size, config.minibatches, root, iteration, epoch):
            loss, grad = critic_loss(critic, phi, batch.subset(indices), config.critic_clip_epsilon)
            _require_finite(grad, "critic gradient", iteration)
            phi = critic_update(phi, grad, config.critic_learning_rate, optimizer)
            losses.append(loss)
    return phi, float(np.mean(losses))


def quadratic_step(problem: TeamQuadratic, theta: np.ndarray, config: TrainConfig,
                   optimizer: Optimizer) -> Tuple[np.ndarray, GradientSet, ConsensusOutcome, float, float]:
    """
    One exact-gradient update on the team-quadratic objective.

    Returns ``(theta_next, gradients, outcome, J(theta), ascent_rate)`` where
    ``ascent_rate`` is the directional derivative of J along the applied direction.
    """
    value, blocks = problem.evaluate(theta)
    gradients = GradientSet.from_vectors(blocks)
    if config.effective_coefficient == 0.0:
        outcome = zero_consensus(gradients, config.consensus_solver)
    else:
        outcome = solve_consensus_qp(gradients, tol=config.consensus_tol, max_iter=config.consensus_max_iter,
                                     solver=config.consensus_solver)
    direction = np.concatenate([
        _head_direction(config, gradients[i], gradients[i], outcome.u_star) for i in range(gradients.n_agents)
    ])
    ascent_rate = float(np.concatenate(blocks) @ direction)
    return optimizer.step(theta, -direction), gradients, outcome, value, ascent_rate


def theta_params(theta: np.ndarray, n_agents: int) -> PolicyParams:
    """Team-quadratic parameters wrapped as per-agent head blocks for checkpointing."""
    block = theta.size // n_agents
    layout = ParamLayout.from_pairs([(f"head{i}/theta", (block,)) for i in range(n_agents)])
    return PolicyParams(layout, np.array(theta, dtype=np.float64), n_agents)


class Trainer:
    """Owns the parameters, optimizers and output files of one run."""

    def __init__(self, config: RunConfig, output_dir: Union[str, Path, None] = None):
        self.config = config
        self.output_dir = Path(output_dir or config.output_dir)
        self.root = RngStream(config.seed)
        self.n_agents = config.n_agents
        self.actor_optimizer = make_optimizer(config.optimizer, config.learning_rate)
        self.critic_optimizer = make_optimizer(config.optimizer, config.critic_learning_rate)
        self.equilibrium_iteration: Optional[int] = None
        self.history: List[IterationMetrics] = []

        self.problem: Optional[TeamQuadratic] = None
        self.theta: Optional[np.ndarray] = None
        self.env = None
        self.policy: Optional[Policy] = None
        self.params: Optional[PolicyParams] = None
        self.critic: Optional[Critic] = None
        self.phi: Optional[np.ndarray] = None

        if config.env == ENV_TEAM_QUADRATIC:
            self.problem = make_team_quadratic(config)
            self.theta = self.problem.initial_theta(self.root.spawn(STREAM_INIT, _INIT_THETA))
        else:
            self.env = make_env(config)
            self.policy = build_policy(config, self.env.spec)
            self.critic = build_critic(config, self.env.spec)
            self.params = self.policy.init_params(self.root.spawn(STREAM_INIT, _INIT_POLICY))
            self.phi = self.critic.init_params(self.root.spawn(STREAM_INIT, _INIT_CRITIC))

    @property
    def checkpoint_params(self) -> PolicyParams:
        if self.problem is not None:
            return theta_params(self.theta, self.problem.n_agents)
        return self.params

    def run_iteration(self, iteration: int) -> IterationMetrics:
        """Collect, solve, update; one metrics record."""
        start = time.perf_counter()
        try:
            if self.problem is not None:
                metrics = self._quadratic_iteration(iteration)
            else:
                metrics = self._rl_iteration(iteration)
        except NonFiniteError as e:
            raise NumericAbort(e.quantity, iteration) from e
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        if self.config.record_wall_time:
            metrics.wall_ms = elapsed_ms
        logger.debug(f"Iteration {iteration} took {elapsed_ms:.1f} ms")
        for name in ("mean_return", "u_star_norm", "kkt_margin", "actor_surrogate", "critic_loss"):
            if not np.isfinite(getattr(metrics, name)):
                raise NumericAbort(name, iteration)
        return metrics

    def _rl_iteration(self, iteration: int) -> IterationMetrics:
        config = self.config
        batch = collect_rollouts(self.policy, self.params, self.critic, self.phi, config, self.root, iteration)
        if config.effective_coefficient == 0.0:
            gradients = local_gradients(batch, self.policy, self.params)
            outcome = zero_consensus(gradients, config.consensus_solver)
        else:
            gradients, outcome = compute_consensus(batch, self.policy, self.params, config)
        self._note_equilibrium(iteration, outcome)

        self.params, actor = ppo_actor_update(self.policy, self.params, batch, outcome.u_star, config,
                                              self.actor_optimizer, gradients, self.root, iteration)
        self.phi, loss = ppo_critic_update(self.critic, self.phi, batch, config, self.critic_optimizer,
                                           self.root, iteration)
        logger.debug(f"Iteration {iteration}: clip fraction {actor.clip_fraction:.3f}, {outcome}")
        return IterationMetrics(
            iteration=iteration,
            mean_return=batch.mean_episode_return,
            u_star_norm=outcome.u_norm,
            kkt_margin=kkt_margin(gradients, outcome),
            g_norms=[float(n) for n in gradients.norms],
            actor_surrogate=actor.surrogate,
            critic_loss=loss,
            qp_iters=int(outcome.iterations),
        )

    def _quadratic_iteration(self, iteration: int) -> IterationMetrics:
        self.theta, gradients, outcome, value, ascent_rate = quadratic_step(
            self.problem, self.theta, self.config, self.actor_optimizer)
        _require_finite(self.theta, "team-quadratic parameters", iteration)
        self._note_equilibrium(iteration, outcome)
        return IterationMetrics(
            iteration=iteration,
            mean_return=value,
            u_star_norm=outcome.u_norm,
            kkt_margin=kkt_margin(gradients, outcome),
            g_norms=[float(n) for n in gradients.norms],
            actor_surrogate=ascent_rate,
            critic_loss=0.0,
            qp_iters=int(outcome.iterations),
        )

    def _note_equilibrium(self, iteration: int, outcome: ConsensusOutcome):
        if self.config.effective_coefficient == 0.0 or self.equilibrium_iteration is not None:
            return
        if equilibrium_check(outcome, self.config.equilibrium_tol):
            self.equilibrium_iteration = iteration
            logger.info(f"Equilibrium reached at iteration {iteration}: "
                        f"||u*|| = {outcome.u_norm:.3e} <= {self.config.equilibrium_tol:.1e}")

    def save_checkpoint(self, name: str, iteration: int) -> Path:
        path = self.output_dir / CHECKPOINT_DIR / name
        write_checkpoint(path, self.checkpoint_params,
                         {"iteration": iteration, "seed": self.config.seed, "mode": self.config.mode,
                          "env": self.config.env})
        logger.debug(f"Checkpoint written: {path}")
        return path

    def run(self, on_iteration: Optional[Callable[[IterationMetrics], None]] = None) -> List[IterationMetrics]:
        """
        Run every configured iteration, writing metrics, the effective config and checkpoints.

        Raises:
            NumericAbort: a non-finite quantity; rows already written stay on disk
        """
        config = self.config
        ConfigManager().save_config(config, self.output_dir)
        interval = config.checkpoint_interval
        with MetricsWriter(self.output_dir, config.metrics_format, self.n_agents) as writer:
            for iteration in range(config.iterations):
                metrics = self.run_iteration(iteration)
                writer.write(metrics)
                self.history.append(metrics)
                log_iteration(metrics)
                if on_iteration is not None:
                    on_iteration(metrics)
                if interval > 0 and (iteration + 1) % interval == 0:
                    self.save_checkpoint(f"iter_{iteration + 1:06d}.ckpt", iteration)
        if config.iterations > 0:
            self.save_checkpoint("final.ckpt", config.iterations - 1)
        if self.equilibrium_iteration is None and config.effective_coefficient != 0.0 and config.iterations:
            logger.info(f"Equilibrium tolerance {config.equilibrium_tol:.1e} not reached "
                        f"in {config.iterations} iterations")
        return self.history


def train(config: RunConfig, output_dir: Union[str, Path, None] = None) -> List[IterationMetrics]:
    """Run a full training job and return its metrics records."""
    return Trainer(config, output_dir).run()
