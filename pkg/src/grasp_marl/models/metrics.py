"""
Metrics Data Models

Per-iteration training records, verification reports and ablation records.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple


@dataclass
class IterationMetrics:
    """One training iteration."""

    iteration: int
    mean_return: float
    u_star_norm: float
    kkt_margin: float
    g_norms: List[float]
    actor_surrogate: float
    critic_loss: float
    qp_iters: int
    wall_ms: float = 0.0

    @staticmethod
    def columns(n_agents: int) -> List[str]:
        """Fixed metrics column order."""
        return (["iteration", "mean_return", "u_star_norm", "kkt_margin"]
                + [f"g_norm_{i}" for i in range(n_agents)]
                + ["actor_surrogate", "critic_loss", "qp_iters", "wall_ms"])

    def row(self) -> List[Any]:
        return ([self.iteration, self.mean_return, self.u_star_norm, self.kkt_margin]
                + list(self.g_norms)
                + [self.actor_surrogate, self.critic_loss, self.qp_iters, self.wall_ms])

    def to_dict(self) -> Dict[str, Any]:
        return dict(zip(self.columns(len(self.g_norms)), self.row()))


@dataclass
class VerifyReport:
    """Outcome of one verification suite."""

    suite: str
    cases_run: int = 0
    cases_passed: int = 0
    worst_residuals: Dict[str, float] = field(default_factory=dict)
    passed: bool = True
    notes: List[str] = field(default_factory=list)

    def record(self, ok: bool, **residuals: float):
        """Count one case and keep the worst value seen for each residual."""
        self.cases_run += 1
        if ok:
            self.cases_passed += 1
        else:
            self.passed = False
        for name, value in residuals.items():
            value = float(value)
            previous = self.worst_residuals.get(name)
            if previous is None or value > previous:
                self.worst_residuals[name] = value

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': self.suite,
            'cases_run': self.cases_run,
            'cases_passed': self.cases_passed,
            'worst_residuals': dict(self.worst_residuals),
            'pass': self.passed,
            'notes': list(self.notes),
        }

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{k}={v:.3e}" for k, v in self.worst_residuals.items())
        return f"[{status}] {self.suite}: {self.cases_passed}/{self.cases_run} cases" + (f" ({worst})" if worst else "")


@dataclass
class AblationRecord:
    """Final state of one (mode, seed) training run."""

    mode: str
    seed: int
    final_mean_return: float
    final_u_star_norm: float
    greedy_joint_action: Optional[Tuple[int, ...]] = None
    reached_optimum: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode,
            'seed': self.seed,
            'final_mean_return': self.final_mean_return,
            'final_u_star_norm': self.final_u_star_norm,
            'greedy_joint_action': "" if self.greedy_joint_action is None
            else "-".join(str(a) for a in self.greedy_joint_action),
            'reached_optimum': "" if self.reached_optimum is None else self.reached_optimum,
        }
