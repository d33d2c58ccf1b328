"""
Cooperative environments and the team-quadratic objective.
"""

import numpy as np

from ...models.config import TrainConfig
from ...utils.constants import (
    CLIMB_PAYOFF, CLIMB_PAYOFF_SCALE, COORDINATION_PAYOFF, ENV_GRID_SPREAD, ENV_MATRIX_CLIMB,
    ENV_MATRIX_COORDINATION, ENV_MATRIX_CUSTOM, ENV_TEAM_QUADRATIC, STREAM_PROBLEM
)
from ..numerics import RngStream
from .base import CooperativeEnv, EnvSpec, StepResult
from .grid_spread import GridSpreadEnv, GridState, coverage_reward, grid_spread_step
from .matrix_game import MatrixGameEnv, MatrixGameState, matrix_game_step, validate_payoff
from .team_quadratic import TeamQuadratic, team_quadratic_eval


def preset_payoff(env: str, payoff=None) -> np.ndarray:
    """Payoff tensor of a matrix-game preset (``payoff`` is used by ``matrix_custom``)."""
    if env == ENV_MATRIX_CLIMB:
        return np.asarray(CLIMB_PAYOFF) * CLIMB_PAYOFF_SCALE
    if env == ENV_MATRIX_COORDINATION:
        return np.asarray(COORDINATION_PAYOFF)
    if env == ENV_MATRIX_CUSTOM:
        if payoff is None:
            raise ValueError("matrix_custom requires env_params.payoff")
        return validate_payoff(payoff)
    raise ValueError(f"{env} is not a matrix game")


def make_env(config: TrainConfig) -> CooperativeEnv:
    """Fresh environment instance for a rollout worker."""
    params = config.env_params
    if config.env == ENV_GRID_SPREAD:
        return GridSpreadEnv(params.n_agents, params.grid_width, params.episode_length,
                             params.collision_penalty)
    if config.env == ENV_TEAM_QUADRATIC:
        raise ValueError("team_quadratic is an objective, not an episodic environment; use make_team_quadratic")
    return MatrixGameEnv(preset_payoff(config.env, params.payoff), params.episode_length)


def make_team_quadratic(config: TrainConfig) -> TeamQuadratic:
    """Problem instance drawn from the run seed's problem stream."""
    rng = RngStream(config.seed, (STREAM_PROBLEM,))
    return TeamQuadratic.random(rng, config.env_params.n_agents, config.env_params.dim_per_agent)


__all__ = [
    "CooperativeEnv",
    "EnvSpec",
    "StepResult",
    "MatrixGameEnv",
    "MatrixGameState",
    "matrix_game_step",
    "validate_payoff",
    "GridSpreadEnv",
    "GridState",
    "grid_spread_step",
    "coverage_reward",
    "TeamQuadratic",
    "team_quadratic_eval",
    "preset_payoff",
    "make_env",
    "make_team_quadratic",
]
