"""
Update directions built from an agent gradient and the consensus direction.
"""

import numpy as np

from ...utils.exceptions import GraspError
from ...utils.validators import Validators


def _pair(g_i, u_star):
    g = Validators.as_vector(g_i, "agent gradient")
    u = Validators.as_vector(u_star, "consensus direction")
    Validators.require_same_dimension(g, u, "agent gradient and consensus direction")
    return g, u


def realigned_direction(g_i, u_star) -> np.ndarray:
    """``g_i + u*``."""
    g, u = _pair(g_i, u_star)
    return g + u


def geometric_aligned_factor(g_i, u_star) -> float:
    """
    ``(||u*||^2 + <g_i, u*>) / (||g_i||^2 + ||u*||^2)``, kept in [0, 1].

    For an exact consensus direction ``<g_i, u*> >= ||u*||^2`` and the formula
    already lies in [0, 1]. A solver residual can leave ``g_i + u*`` opposing
    ``g_i`` or ``u*``; the factor is then 0 so the update never harms either.

    Raises:
        GraspError: both vectors are zero
    """
    g, u = _pair(g_i, u_star)
    gg = float(g @ g)
    uu = float(u @ u)
    gu = float(g @ u)
    denom = gg + uu
    if denom == 0.0:
        raise GraspError("Aligned factor undefined: agent gradient and consensus direction are both zero")
    numerator = uu + gu
    if numerator <= 0.0 or gg + gu < 0.0:
        return 0.0
    return min(1.0, numerator / denom)


def geometric_aligned_direction(g_i, u_star) -> np.ndarray:
    """``Gamma_i * (g_i + u*)``; vanishes when u* does."""
    g, u = _pair(g_i, u_star)
    return geometric_aligned_factor(g, u) * (g + u)
