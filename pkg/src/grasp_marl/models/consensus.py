"""
Consensus Data Models

Gradient sets fed to the consensus operator and the outcomes/certificates it returns.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Sequence

import numpy as np

from ..utils.validators import Validators


@dataclass(frozen=True, eq=False)
class GradientSet:
    """N per-agent gradient vectors of common dimension D, stacked row-wise."""

    gradients: np.ndarray

    @classmethod
    def from_vectors(cls, vectors: Sequence[Any]) -> 'GradientSet':
        """Validate and stack gradient vectors (agent ids follow list order)."""
        return cls(Validators.gradient_matrix(vectors))

    @property
    def n_agents(self) -> int:
        return int(self.gradients.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.gradients.shape[1])

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.gradients, axis=1)

    def __len__(self) -> int:
        return self.n_agents

    def __getitem__(self, agent: int) -> np.ndarray:
        return self.gradients[agent]


@dataclass(eq=False)
class ConsensusOutcome:
    """Consensus direction, simplex weights and solver diagnostics."""

    u_star: np.ndarray
    weights: np.ndarray
    iterations: int = 0
    objective: float = 0.0
    converged: bool = True
    gap: float = 0.0
    solver: str = "pgd"

    @property
    def u_norm(self) -> float:
        return float(np.linalg.norm(self.u_star))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'u_star': self.u_star.tolist(),
            'weights': self.weights.tolist(),
            'iterations': self.iterations,
            'objective': self.objective,
            'converged': self.converged,
            'gap': self.gap,
            'solver': self.solver,
        }

    def __str__(self) -> str:
        status = "converged" if self.converged else "NOT converged"
        return (f"ConsensusOutcome(||u*||={self.u_norm:.3e}, objective={self.objective:.3e}, "
                f"{self.iterations} iterations, gap={self.gap:.2e}, {status})")


@dataclass(eq=False)
class KktReport:
    """Reconstructed duals of the consensus QP and their worst violation."""

    lam: float
    mu: np.ndarray
    max_violation: float
    passed: bool
    complementarity: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def kkt_margin(self) -> float:
        """``min_j g_j . u* - ||u*||^2``."""
        return float(np.min(self.mu)) if self.mu.size else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lambda': self.lam,
            'mu': self.mu.tolist(),
            'max_violation': self.max_violation,
            'pass': self.passed,
        }
