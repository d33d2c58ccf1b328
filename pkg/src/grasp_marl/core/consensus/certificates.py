"""
KKT certificates for the consensus QP.

For the simplex-constrained minimum-norm problem the stationarity conditions
reduce to ``g_j . u* = lambda + mu_j`` with ``lambda = ||u*||^2``, ``mu_j >= 0``
and ``c_j mu_j = 0``.
"""

import numpy as np

from ...models.consensus import ConsensusOutcome, KktReport
from ...utils.constants import KKT_EPS
from ...utils.exceptions import DimensionMismatchError
from .solver import _as_gradient_set


def verify_kkt(gradients, outcome: ConsensusOutcome, eps: float = KKT_EPS) -> KktReport:
    """
    Reconstruct the duals of ``outcome`` and check them at tolerance ``eps``.

    Checked conditions: dual feasibility ``mu_j >= -eps`` and complementary
    slackness ``|c_j mu_j| <= eps``. ``lambda`` is ``||u*||^2`` by construction.

    Raises:
        DimensionMismatchError: u* or the weights do not fit the gradient set
    """
    gset = _as_gradient_set(gradients)
    G = gset.gradients
    u = np.asarray(outcome.u_star, dtype=np.float64).reshape(-1)
    c = np.asarray(outcome.weights, dtype=np.float64).reshape(-1)
    if u.size != gset.dimension:
        raise DimensionMismatchError([0], [u.size], f"u* vs gradient dimension {gset.dimension}")
    if c.size != gset.n_agents:
        raise DimensionMismatchError([0], [c.size], f"weights vs {gset.n_agents} agents")

    lam = float(u @ u)
    mu = G @ u - lam
    complementarity = c * mu

    violation = 0.0
    if mu.size:
        violation = max(violation, float(-np.min(mu)))
        violation = max(violation, float(np.max(np.abs(complementarity))))

    return KktReport(
        lam=lam,
        mu=mu,
        max_violation=violation,
        passed=violation <= eps,
        complementarity=complementarity,
    )


def kkt_margin(gradients, outcome: ConsensusOutcome) -> float:
    """``min_j g_j . u* - ||u*||^2`` (non-negative at the exact optimum)."""
    gset = _as_gradient_set(gradients)
    u = np.asarray(outcome.u_star, dtype=np.float64)
    return float(np.min(gset.gradients @ u) - u @ u)


def equilibrium_check(outcome: ConsensusOutcome, tol: float) -> bool:
    """True iff ``||u*|| <= tol``."""
    return outcome.u_norm <= tol
