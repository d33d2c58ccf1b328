"""
Exceptions

Structured error types raised across the GRASP-MARL package.
"""

from typing import Optional, Sequence


class GraspError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(GraspError, ValueError):
    """Vectors that must share a dimension do not."""

    def __init__(self, indices: Sequence[int], dimensions: Sequence[int], what: str = "gradients"):
        self.indices = tuple(indices)
        self.dimensions = tuple(dimensions)
        detail = ", ".join(f"#{i} has dimension {d}" for i, d in zip(self.indices, self.dimensions))
        super().__init__(f"Dimension mismatch among {what}: {detail}")


class NonFiniteError(GraspError, ValueError):
    """NaN or Inf reached a computation that forbids it."""

    def __init__(self, quantity: str):
        self.quantity = quantity
        super().__init__(f"Non-finite values in {quantity}")


class EmptyBatchError(GraspError, ValueError):
    """An operation received no samples."""


class InvalidActionError(GraspError, ValueError):
    """An action id lies outside an agent's action space."""


class UnknownObservationError(GraspError, ValueError):
    """An observation lies outside an agent's observation space."""


class NotPositiveDefiniteError(GraspError, ValueError):
    """A matrix required to be positive definite is not."""


class ConfigError(GraspError, ValueError):
    """A configuration key violates its constraint."""

    def __init__(self, key: str, constraint: str):
        self.key = key
        self.constraint = constraint
        super().__init__(f"{key} {constraint}")


class NumericAbort(GraspError, RuntimeError):
    """A training iteration produced non-finite numbers and was aborted."""

    def __init__(self, quantity: str, iteration: Optional[int] = None):
        self.quantity = quantity
        self.iteration = iteration
        where = f" at iteration {iteration}" if iteration is not None else ""
        super().__init__(f"Non-finite {quantity}{where}; iteration aborted")
