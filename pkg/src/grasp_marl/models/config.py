"""
Configuration Data Models

Training and run configuration after validation and defaulting.
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

from ..utils.constants import (
    DEFAULT_CLIP_EPSILON, DEFAULT_CONSENSUS_COEFFICIENT, DEFAULT_CONSENSUS_MAX_ITER,
    DEFAULT_CONSENSUS_TOL, DEFAULT_CRITIC_CLIP_EPSILON, DEFAULT_CRITIC_HIDDEN_WIDTH,
    DEFAULT_CRITIC_LEARNING_RATE, DEFAULT_EPISODES_PER_ITERATION, DEFAULT_EQUILIBRIUM_TOL,
    DEFAULT_GAE_LAMBDA, DEFAULT_GAMMA, DEFAULT_HIDDEN_WIDTH, DEFAULT_ITERATIONS,
    DEFAULT_LEARNING_RATE, DEFAULT_MINIBATCHES, DEFAULT_PPO_EPOCHS, ENV_MATRIX_CLIMB,
    GRID_SPREAD_COLLISION_PENALTY, GRID_SPREAD_WIDTH, METRICS_CSV,
    MODE_BASELINE, MODE_GRASP, OPTIMIZER_ADAM, POLICY_TABULAR, SOLVER_PGD,
    TEAM_QUADRATIC_DIM_PER_AGENT
)


@dataclass
class EnvParams:
    """Environment parameters; keys irrelevant to the selected preset are carried unchanged."""

    episode_length: int = 1
    payoff: Optional[List[Any]] = None
    grid_width: int = GRID_SPREAD_WIDTH
    n_agents: int = 2
    collision_penalty: float = GRID_SPREAD_COLLISION_PENALTY
    dim_per_agent: int = TEAM_QUADRATIC_DIM_PER_AGENT

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EnvParams':
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class TrainConfig:
    """Everything the trainer needs for one run."""

    env: str = ENV_MATRIX_CLIMB
    mode: str = MODE_GRASP
    seed: int = 0
    policy: str = POLICY_TABULAR
    critic: str = POLICY_TABULAR
    learning_rate: float = DEFAULT_LEARNING_RATE
    critic_learning_rate: float = DEFAULT_CRITIC_LEARNING_RATE
    gamma: float = DEFAULT_GAMMA
    gae_lambda: float = DEFAULT_GAE_LAMBDA
    clip_epsilon: float = DEFAULT_CLIP_EPSILON
    critic_clip_epsilon: float = DEFAULT_CRITIC_CLIP_EPSILON
    ppo_epochs: int = DEFAULT_PPO_EPOCHS
    minibatches: int = DEFAULT_MINIBATCHES
    episodes_per_iteration: int = DEFAULT_EPISODES_PER_ITERATION
    iterations: int = DEFAULT_ITERATIONS
    consensus_tol: float = DEFAULT_CONSENSUS_TOL
    consensus_max_iter: int = DEFAULT_CONSENSUS_MAX_ITER
    consensus_solver: str = SOLVER_PGD
    consensus_coefficient: float = DEFAULT_CONSENSUS_COEFFICIENT
    optimizer: str = OPTIMIZER_ADAM
    advantage_normalization: bool = False
    rollout_workers: int = 1
    env_params: EnvParams = field(default_factory=EnvParams)
    hidden_width: int = DEFAULT_HIDDEN_WIDTH
    critic_hidden_width: int = DEFAULT_CRITIC_HIDDEN_WIDTH
    equilibrium_tol: float = DEFAULT_EQUILIBRIUM_TOL

    @property
    def effective_coefficient(self) -> float:
        """Consensus coefficient actually applied (0 in baseline mode)."""
        if self.mode == MODE_BASELINE:
            return 0.0
        return float(self.consensus_coefficient)

    @property
    def n_agents(self) -> int:
        return int(self.env_params.n_agents)


@dataclass
class RunConfig(TrainConfig):
    """TrainConfig plus output, logging and checkpoint settings."""

    output_dir: str = "runs/default"
    metrics_format: str = METRICS_CSV
    checkpoint_interval: int = 0
    verbosity: int = 1
    record_wall_time: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Effective configuration as a JSON-ready mapping in declaration order."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        values = dict(data)
        if isinstance(values.get('env_params'), dict):
            values['env_params'] = EnvParams.from_dict(values['env_params'])
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})
