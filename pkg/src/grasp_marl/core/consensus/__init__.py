"""
Consensus operator: minimum-norm point solver, KKT certificates and aligned directions.
"""

from .alignment import geometric_aligned_direction, geometric_aligned_factor, realigned_direction
from .certificates import equilibrium_check, kkt_margin, verify_kkt
from .solver import frank_wolfe_gap, min_norm_pair_oracle, solve_consensus_qp

__all__ = [
    "solve_consensus_qp",
    "min_norm_pair_oracle",
    "frank_wolfe_gap",
    "verify_kkt",
    "kkt_margin",
    "equilibrium_check",
    "realigned_direction",
    "geometric_aligned_factor",
    "geometric_aligned_direction",
]
