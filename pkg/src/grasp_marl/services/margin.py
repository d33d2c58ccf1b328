"""
Margin Check

Exact check of the consensus-step expansion on the team-quadratic objective.
For a step ``theta + eta * d`` with ``d_i = g_i + u*``,

    dJ = eta * grad J . d - eta^2 / 2 * d^T Q d

so the first-order prediction ``eta * (sum ||g_i||^2 + sum <g_i, u*>)`` is off
by at most ``eta^2 * ||Q||_2 * ||d||^2 / 2``.
"""

from typing import Optional, Sequence

import numpy as np

from ..core.consensus import solve_consensus_qp
from ..core.envs import TeamQuadratic, make_team_quadratic
from ..core.numerics import RngStream
from ..models.config import TrainConfig
from ..models.metrics import VerifyReport
from ..utils.constants import STREAM_VERIFY
from ..utils.logger import get_logger

logger = get_logger(__name__)

MARGIN_STEP_SIZES = (1e-3, 1e-4, 1e-5)
MARGIN_POINTS = 100
MARGIN_CONSENSUS_TOL = 1e-12
MARGIN_CROSS_TOL = 1e-8
# absolute slack for the float64 evaluation of J differences
MARGIN_ROUNDING_SLACK = 1e-12
_MARGIN_STREAM = 7


def _step_terms(problem: TeamQuadratic, theta: np.ndarray, eta: float, norm_q: float):
    value, blocks = problem.evaluate(theta)
    outcome = solve_consensus_qp(blocks, tol=MARGIN_CONSENSUS_TOL, max_iter=100_000)
    u = outcome.u_star
    grad = np.concatenate(blocks)
    d_on = np.concatenate([g + u for g in blocks])

    delta_on = problem.value(theta + eta * d_on) - value
    delta_off = problem.value(theta + eta * grad) - value
    first_order = eta * (float(grad @ grad) + sum(float(g @ u) for g in blocks))
    bound = 0.5 * norm_q * float(d_on @ d_on) * eta * eta
    curvature = float(d_on @ problem.Q @ d_on)
    slope = float(grad @ d_on)
    eta_max = np.inf if curvature == 0.0 else 2.0 * slope / curvature
    cross = sum(float(g @ u) for g in blocks)
    return {
        "delta_on": delta_on,
        "delta_off": delta_off,
        "first_order": first_order,
        "bound": bound,
        "eta_max": eta_max,
        "cross": cross,
        "u_sq": float(u @ u),
    }


def quadratic_margin_check(config: TrainConfig, step_sizes: Sequence[float] = MARGIN_STEP_SIZES,
                           points: int = MARGIN_POINTS, problem: Optional[TeamQuadratic] = None) -> VerifyReport:
    """
    Check the consensus-step expansion at ``points`` random parameters plus ``theta*``.

    Per point and step size the report records:

    - ``first_order_excess``: ``|dJ - first order| - C eta^2`` (must be <= slack)
    - ``cross_deficit``: ``N ||u*||^2 - sum <g_i, u*>`` (must be <= 1e-8)
    - ``positivity_deficit``: ``-dJ`` for steps below ``2 grad J.d / d^T Q d`` (must be <= slack)
    - ``on_off_deficit``: ``eta N ||u*||^2 - C eta^2 - (dJ_on - dJ_off)`` (must be <= slack)
    """
    problem = problem or make_team_quadratic(config)
    rng = RngStream(config.seed, (STREAM_VERIFY, _MARGIN_STREAM))
    norm_q = problem.spectral_norm
    n = problem.n_agents
    report = VerifyReport(suite="margin")
    smallest_threshold = np.inf

    thetas = [problem.theta_star.copy()]
    thetas += [problem.initial_theta(rng.spawn(p)) for p in range(points)]
    for index, theta in enumerate(thetas):
        for eta in step_sizes:
            terms = _step_terms(problem, theta, eta, norm_q)
            excess = abs(terms["delta_on"] - terms["first_order"]) - terms["bound"]
            cross_deficit = n * terms["u_sq"] - terms["cross"]
            positivity = -terms["delta_on"] if eta <= terms["eta_max"] else 0.0
            on_off = eta * n * terms["u_sq"] - terms["bound"] - (terms["delta_on"] - terms["delta_off"])
            smallest_threshold = min(smallest_threshold, terms["eta_max"])
            ok = (excess <= MARGIN_ROUNDING_SLACK and cross_deficit <= MARGIN_CROSS_TOL
                  and positivity <= MARGIN_ROUNDING_SLACK and on_off <= MARGIN_ROUNDING_SLACK)
            if index == 0:
                ok = ok and abs(terms["delta_on"]) <= MARGIN_ROUNDING_SLACK and terms["u_sq"] == 0.0
            report.record(ok, first_order_excess=excess, cross_deficit=cross_deficit,
                          positivity_deficit=positivity, on_off_deficit=on_off)

    report.notes.append(f"dJ >= 0 guaranteed for step sizes below {smallest_threshold:.4g}")
    report.notes.append(f"||Q||_2 = {norm_q:.6g}, N = {n}, dimension = {problem.dimension}")
    logger.debug(f"Margin check: {report}")
    return report
