"""
Team Quadratic

Closed-form differentiable team objective

    J(theta) = -1/2 (theta - theta*)^T Q (theta - theta*)

over the concatenated per-agent parameter blocks, with exact block gradients.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ...utils.constants import TEAM_QUADRATIC_AGENTS, TEAM_QUADRATIC_DIM_PER_AGENT, TEAM_QUADRATIC_RIDGE
from ...utils.exceptions import DimensionMismatchError, NotPositiveDefiniteError
from ..numerics import RngStream


@dataclass(eq=False)
class TeamQuadratic:
    """Positive-definite quadratic team objective split into equal agent blocks."""

    Q: np.ndarray
    theta_star: np.ndarray
    n_agents: int

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=np.float64)
        self.theta_star = np.asarray(self.theta_star, dtype=np.float64).reshape(-1)
        dim = self.theta_star.size
        if self.Q.shape != (dim, dim):
            raise DimensionMismatchError([0], [self.Q.shape[0]], f"Q vs parameter dimension {dim}")
        if dim % self.n_agents:
            raise ValueError(f"Dimension {dim} does not split into {self.n_agents} equal blocks")
        if not np.allclose(self.Q, self.Q.T, rtol=0.0, atol=1e-12):
            raise NotPositiveDefiniteError("Q must be symmetric")
        try:
            np.linalg.cholesky(self.Q)
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefiniteError(f"Q is not positive definite ({e})") from e

    @classmethod
    def random(cls, rng: RngStream, n_agents: int = TEAM_QUADRATIC_AGENTS,
               dim_per_agent: int = TEAM_QUADRATIC_DIM_PER_AGENT,
               ridge: float = TEAM_QUADRATIC_RIDGE) -> 'TeamQuadratic':
        """``Q = A^T A + ridge * I`` with Gaussian ``A`` scaled so ``||A^T A||`` is about 1."""
        dim = n_agents * dim_per_agent
        A = rng.normal(0.0, 1.0, size=(dim, dim)) / (2.0 * np.sqrt(dim))
        Q = A.T @ A + ridge * np.eye(dim)
        Q = 0.5 * (Q + Q.T)
        theta_star = rng.normal(0.0, 1.0, size=dim)
        return cls(Q, theta_star, n_agents)

    @property
    def dimension(self) -> int:
        return self.theta_star.size

    @property
    def block_size(self) -> int:
        return self.dimension // self.n_agents

    @property
    def spectral_norm(self) -> float:
        return float(np.linalg.eigvalsh(self.Q)[-1])

    def block(self, vector: np.ndarray, agent: int) -> np.ndarray:
        b = self.block_size
        return vector[agent * b:(agent + 1) * b]

    def value(self, theta: np.ndarray) -> float:
        e = np.asarray(theta, dtype=np.float64) - self.theta_star
        return -0.5 * float(e @ self.Q @ e)

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        e = np.asarray(theta, dtype=np.float64) - self.theta_star
        return -(self.Q @ e)

    def evaluate(self, theta: np.ndarray) -> Tuple[float, List[np.ndarray]]:
        """Value and exact per-agent block gradients at ``theta``."""
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        if theta.size != self.dimension:
            raise DimensionMismatchError([0], [theta.size], f"theta vs dimension {self.dimension}")
        grad = self.gradient(theta)
        return self.value(theta), [self.block(grad, i).copy() for i in range(self.n_agents)]

    def initial_theta(self, rng: RngStream, scale: Optional[float] = 1.0) -> np.ndarray:
        return self.theta_star + rng.normal(0.0, scale, size=self.dimension)


def team_quadratic_eval(problem: TeamQuadratic, theta: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """``(J(theta), [g_1..g_N])`` with ``g_i = -[Q (theta - theta*)]_i``."""
    return problem.evaluate(theta)
