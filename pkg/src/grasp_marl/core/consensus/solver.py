"""
Consensus QP Solver

Minimum-norm point in the convex hull of a gradient set:

    minimise 1/2 c^T P c   subject to   sum(c) = 1, c >= 0,   P = G G^T

solved by projected gradient descent (default) or by away-step Frank-Wolfe.
Both stop on the Frank-Wolfe gap ``c^T P c - min_j (P c)_j`` measured against
``tol * max_i ||g_i||^2``, so ``solve(alpha * G)`` takes the same iterates as
``solve(G)`` for every ``alpha > 0``.
"""

from typing import Sequence, Tuple

import numpy as np

from ...models.consensus import ConsensusOutcome, GradientSet
from ...utils.constants import (
    DEFAULT_CONSENSUS_MAX_ITER, DEFAULT_CONSENSUS_TOL, SOLVER_FRANK_WOLFE, SOLVER_PGD
)
from ...utils.exceptions import NonFiniteError
from ...utils.logger import get_logger
from ..numerics import _gram_from_matrix, largest_eigenvalue, project_to_simplex

logger = get_logger(__name__)


def frank_wolfe_gap(P: np.ndarray, c: np.ndarray) -> float:
    """Duality gap ``max_j (c^T P c - e_j^T P c)``, clipped at 0."""
    Pc = P @ c
    return max(0.0, float(c @ Pc - np.min(Pc)))


def _as_gradient_set(gradients) -> GradientSet:
    if isinstance(gradients, GradientSet):
        return gradients
    return GradientSet.from_vectors(gradients)


def _outcome(G: np.ndarray, P: np.ndarray, c: np.ndarray, iterations: int,
             converged: bool, solver: str) -> ConsensusOutcome:
    u = c @ G
    return ConsensusOutcome(
        u_star=u,
        weights=c,
        iterations=iterations,
        objective=0.5 * float(u @ u),
        converged=converged,
        gap=frank_wolfe_gap(P, c),
        solver=solver,
    )


def _gram_scale(P: np.ndarray) -> float:
    """Largest squared gradient norm ``max_i P_ii``."""
    return float(np.max(np.diag(P)))


def _solve_pgd(P: np.ndarray, c: np.ndarray, threshold: float, max_iter: int) -> Tuple[np.ndarray, int, bool]:
    L = largest_eigenvalue(P)
    slack = 1e-14 * _gram_scale(P)
    f = 0.5 * float(c @ P @ c)
    for k in range(1, max_iter + 1):
        grad = P @ c
        while True:
            candidate = project_to_simplex(c - grad / L)
            step = candidate - c
            f_new = 0.5 * float(candidate @ P @ candidate)
            # sufficient decrease for an L-smooth quadratic
            if f_new <= f + float(grad @ step) + 0.5 * L * float(step @ step) + slack:
                break
            L *= 2.0
        c, f = candidate, f_new
        if frank_wolfe_gap(P, c) <= threshold:
            return c, k, True
    return c, max_iter, False


def _solve_away_step_fw(P: np.ndarray, c: np.ndarray, threshold: float,
                        max_iter: int) -> Tuple[np.ndarray, int, bool]:
    for k in range(1, max_iter + 1):
        grad = P @ c
        s = int(np.argmin(grad))
        support = np.nonzero(c > 0)[0]
        v = int(support[np.argmax(grad[support])])

        fw_gap = float(grad @ c - grad[s])
        away_gap = float(grad[v] - grad @ c)
        if fw_gap >= away_gap:
            direction = -c.copy()
            direction[s] += 1.0
            gamma_max = 1.0
        else:
            direction = c.copy()
            direction[v] -= 1.0
            alpha_v = c[v]
            gamma_max = alpha_v / (1.0 - alpha_v) if alpha_v < 1.0 else np.inf

        curvature = float(direction @ P @ direction)
        slope = float(grad @ direction)
        if curvature <= 0.0:
            gamma = gamma_max
        else:
            gamma = min(gamma_max, max(0.0, -slope / curvature))
        if not np.isfinite(gamma) or gamma <= 0.0:
            return c, k, frank_wolfe_gap(P, c) <= threshold

        c = c + gamma * direction
        c[c < 1e-15] = 0.0
        if gamma == gamma_max and fw_gap < away_gap:
            c[v] = 0.0  # drop step
        c = c / c.sum()
        if frank_wolfe_gap(P, c) <= threshold:
            return c, k, True
    return c, max_iter, False


def solve_consensus_qp(gradients, tol: float = DEFAULT_CONSENSUS_TOL,
                       max_iter: int = DEFAULT_CONSENSUS_MAX_ITER,
                       solver: str = SOLVER_PGD) -> ConsensusOutcome:
    """
    Find the minimum-norm point u* of the convex hull of ``gradients``.

    Args:
        gradients: a GradientSet or a sequence of equal-length vectors
        tol: Frank-Wolfe gap, relative to the largest squared gradient
            norm, at which the iterate counts as converged
        max_iter: iteration cap; hitting it returns ``converged=False``
        solver: ``"pgd"`` or ``"frank_wolfe"``

    Returns:
        ConsensusOutcome with ``u_star == weights @ G``

    Raises:
        DimensionMismatchError: gradients of different dimension
        NonFiniteError: NaN/Inf gradients or Gram entries
    """
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be > 0 and max_iter >= 1")

    gset = _as_gradient_set(gradients)
    G = gset.gradients
    n = gset.n_agents
    P = _gram_from_matrix(G)
    if not np.all(np.isfinite(P)):
        raise NonFiniteError("Gram matrix")

    if n == 1:
        return _outcome(G, P, np.ones(1), 0, True, solver)
    if not np.any(P):
        # every point of the simplex is optimal
        return _outcome(G, P, np.full(n, 1.0 / n), 0, True, solver)

    if solver not in (SOLVER_PGD, SOLVER_FRANK_WOLFE):
        raise ValueError(f"Unknown consensus solver: {solver}")

    threshold = tol * _gram_scale(P)
    c0 = np.full(n, 1.0 / n)
    if frank_wolfe_gap(P, c0) <= threshold:
        return _outcome(G, P, c0, 0, True, solver)

    if solver == SOLVER_FRANK_WOLFE:
        c, iterations, converged = _solve_away_step_fw(P, c0, threshold, max_iter)
    else:
        c, iterations, converged = _solve_pgd(P, c0, threshold, max_iter)

    outcome = _outcome(G, P, c, iterations, converged, solver)
    if not converged:
        logger.warning(f"Consensus QP hit max_iter={max_iter} with gap {outcome.gap:.3e} "
                       f"(threshold {threshold:.1e})")
    return outcome


def min_norm_pair_oracle(g1: Sequence[float], g2: Sequence[float]) -> ConsensusOutcome:
    """
    Closed-form minimum-norm point of the segment between two gradients.

    ``c = clamp(<g2 - g1, g2> / ||g1 - g2||^2, 0, 1)`` weights ``g1``; equal
    inputs give weights ``(1, 0)``.
    """
    G = GradientSet.from_vectors([g1, g2]).gradients
    a, b = G[0], G[1]
    diff = a - b
    denom = float(diff @ diff)
    if denom == 0.0:
        c = 1.0
    else:
        c = min(1.0, max(0.0, float((b - a) @ b) / denom))
    weights = np.array([c, 1.0 - c])
    u = c * a + (1.0 - c) * b
    P = _gram_from_matrix(G)
    return ConsensusOutcome(
        u_star=u,
        weights=weights,
        iterations=0,
        objective=0.5 * float(u @ u),
        converged=True,
        gap=frank_wolfe_gap(P, weights),
        solver="pair_oracle",
    )
