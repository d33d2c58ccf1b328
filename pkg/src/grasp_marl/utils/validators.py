"""
Validators

Input validation utilities for vectors, gradient sets and hyperparameters.
"""

from typing import Sequence, Union

import numpy as np

from .exceptions import DimensionMismatchError, EmptyBatchError, NonFiniteError

ArrayLike = Union[np.ndarray, Sequence[float]]


class Validators:
    """Collection of validation utilities."""

    @staticmethod
    def as_vector(values: ArrayLike, quantity: str = "vector") -> np.ndarray:
        """Return ``values`` as a finite 1-D float64 array."""
        vec = np.asarray(values, dtype=np.float64)
        if vec.ndim != 1:
            vec = vec.reshape(-1)
        Validators.require_finite(vec, quantity)
        return vec

    @staticmethod
    def require_finite(values: np.ndarray, quantity: str) -> None:
        if not np.all(np.isfinite(values)):
            raise NonFiniteError(quantity)

    @staticmethod
    def require_same_dimension(a: np.ndarray, b: np.ndarray, what: str = "vectors") -> None:
        if a.shape != b.shape:
            raise DimensionMismatchError([0, 1], [a.size, b.size], what)

    @staticmethod
    def gradient_matrix(gradients: Sequence[ArrayLike]) -> np.ndarray:
        """
        Stack a gradient set into an ``(N, D)`` float64 matrix.

        Raises:
            EmptyBatchError: no gradients were given
            DimensionMismatchError: gradients disagree on D, naming every index off the majority
            NonFiniteError: any entry is NaN or Inf
        """
        if len(gradients) == 0:
            raise EmptyBatchError("Gradient set is empty (N must be >= 1)")
        vectors = [np.asarray(g, dtype=np.float64).reshape(-1) for g in gradients]
        dims = [v.size for v in vectors]
        reference = max(set(dims), key=dims.count)
        if reference == 0 or any(d != reference for d in dims):
            offenders = [i for i, d in enumerate(dims) if d != reference or d == 0]
            raise DimensionMismatchError(offenders, [dims[i] for i in offenders])
        matrix = np.vstack(vectors)
        Validators.require_finite(matrix, "gradient set")
        return matrix

    @staticmethod
    def in_range(value: float, low: float, high: float, low_open: bool = False, high_open: bool = False) -> bool:
        """Interval membership with independently open/closed ends."""
        above = value > low if low_open else value >= low
        below = value < high if high_open else value <= high
        return bool(above and below)
