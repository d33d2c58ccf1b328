"""
Advantage Estimation

TD errors, Generalized Advantage Estimation and return targets. All
functions operate on one time-ordered sequence and never carry information
across a terminal step.
"""

from typing import Optional, Sequence

import numpy as np

from ...utils.exceptions import DimensionMismatchError, EmptyBatchError


def _check_discount(gamma: float, lam: Optional[float] = None):
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0,1)")
    if lam is not None and not 0.0 <= lam <= 1.0:
        raise ValueError("gae_lambda must lie in [0,1]")


def td_errors(rewards: Sequence[float], values: Sequence[float], terminals: Sequence[bool],
              gamma: float) -> np.ndarray:
    """
    ``delta_t = r_t + gamma * V(s_{t+1}) * (1 - terminal_t) - V(s_t)``.

    ``values`` has one more entry than ``rewards``; the last one is the
    bootstrap value of the state after the final step.

    Raises:
        DimensionMismatchError: ``len(values) != len(rewards) + 1`` or terminal flags of the wrong length
    """
    _check_discount(gamma)
    r = np.asarray(rewards, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    done = np.asarray(terminals, dtype=bool)
    if v.size != r.size + 1 or done.size != r.size:
        raise DimensionMismatchError([0, 1, 2], [r.size, v.size, done.size], "rewards, values (T+1) and terminals")
    next_values = np.where(done, 0.0, v[1:])
    return r + gamma * next_values - v[:-1]


def gae(deltas: Sequence[float], gamma: float, lam: float, terminals: Sequence[bool]) -> np.ndarray:
    """Backward recursion ``A_t = delta_t + gamma * lam * (1 - terminal_t) * A_{t+1}``."""
    _check_discount(gamma, lam)
    d = np.asarray(deltas, dtype=np.float64)
    done = np.asarray(terminals, dtype=bool)
    if done.size != d.size:
        raise DimensionMismatchError([0, 1], [d.size, done.size], "deltas and terminals")
    advantages = np.zeros_like(d)
    running = 0.0
    decay = gamma * lam
    for t in range(d.size - 1, -1, -1):
        if done[t]:
            running = 0.0
        running = d[t] + decay * running
        advantages[t] = running
    return advantages


def return_targets(advantages: Sequence[float], values_old: Sequence[float]) -> np.ndarray:
    """``R_t = A_t + V(s_t; phi_old)``."""
    a = np.asarray(advantages, dtype=np.float64)
    v = np.asarray(values_old, dtype=np.float64)
    if a.shape != v.shape:
        raise DimensionMismatchError([0, 1], [a.size, v.size], "advantages and old values")
    return a + v


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    """Zero mean, unit variance (unchanged when the batch is constant)."""
    a = np.asarray(advantages, dtype=np.float64)
    if a.size == 0:
        raise EmptyBatchError("Cannot normalise an empty advantage batch")
    std = float(np.std(a))
    centered = a - float(np.mean(a))
    return centered / std if std > 0 else centered
