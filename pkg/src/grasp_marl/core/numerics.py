"""
Numerics

Dense vector primitives, simplex projection, Gram matrices, power iteration
and the seeded random streams shared by every other module.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from ..utils.constants import POWER_ITERATIONS
from ..utils.exceptions import DimensionMismatchError, EmptyBatchError, NonFiniteError
from ..utils.validators import Validators

ArrayLike = Union[np.ndarray, Sequence[float]]


def dot(a: ArrayLike, b: ArrayLike) -> float:
    """Inner product of two equal-length vectors."""
    av = np.asarray(a, dtype=np.float64).reshape(-1)
    bv = np.asarray(b, dtype=np.float64).reshape(-1)
    if av.size != bv.size:
        raise DimensionMismatchError([0, 1], [av.size, bv.size], "vectors")
    return float(np.dot(av, bv))


def norm_sq(a: ArrayLike) -> float:
    av = np.asarray(a, dtype=np.float64).reshape(-1)
    return float(np.dot(av, av))


def gram_matrix(gradients: Sequence[ArrayLike]) -> np.ndarray:
    """
    Gram matrix ``P[i, j] = g_i . g_j`` of a gradient set.

    Each unordered pair is computed once and mirrored, so ``P`` is exactly
    symmetric.

    Raises:
        DimensionMismatchError: gradients of different dimension
        NonFiniteError: non-finite gradient entries
    """
    G = Validators.gradient_matrix(gradients)
    return _gram_from_matrix(G)


def _gram_from_matrix(G: np.ndarray) -> np.ndarray:
    n = G.shape[0]
    P = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            P[i, j] = P[j, i] = float(np.dot(G[i], G[j]))
    return P


def project_to_simplex(v: ArrayLike) -> np.ndarray:
    """
    Euclidean projection of ``v`` onto the probability simplex.

    Sort-then-threshold: find the largest ``rho`` with
    ``u_rho - (sum_{k<=rho} u_k - 1) / rho > 0`` on the descending sort ``u``,
    then clip ``v - theta`` at zero.
    """
    vec = np.asarray(v, dtype=np.float64).reshape(-1)
    if vec.size == 0:
        raise EmptyBatchError("Cannot project an empty vector onto the simplex")
    if not np.all(np.isfinite(vec)):
        raise NonFiniteError("simplex projection input")

    u = np.sort(vec)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, vec.size + 1)
    rho = int(np.nonzero(u - css / ind > 0)[0][-1])
    theta = css[rho] / (rho + 1)
    w = np.maximum(vec - theta, 0.0)

    # renormalise the surviving support so the sum is exact to rounding
    total = w.sum()
    if total > 0:
        w = w / total
    return w


def largest_eigenvalue(P: np.ndarray, iterations: int = POWER_ITERATIONS) -> float:
    """
    Power-iteration estimate of ``lambda_max`` for a symmetric PSD matrix.

    Starts from the all-ones vector, so the result is deterministic. Returns
    0 for the zero matrix.
    """
    n = P.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    estimate = 0.0
    for _ in range(max(1, iterations)):
        y = P @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            # all-ones direction in the null space; fall back to the diagonal bound
            return float(np.max(np.diag(P))) if n else 0.0
        x = y / norm
        estimate = float(x @ P @ x)
    return max(estimate, float(np.max(np.diag(P))))


@dataclass(frozen=True)
class RngStream:
    """
    Reproducible random stream keyed by ``(seed, stream ids)``.

    Backed by a Philox counter-based generator seeded through a
    ``SeedSequence`` spawn key, so identical keys give identical draws on every
    platform and streams with distinct keys are independent.
    """

    seed: int
    stream_id: Tuple[int, ...] = ()
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=tuple(int(i) for i in self.stream_id))
        object.__setattr__(self, "_generator", np.random.Generator(np.random.Philox(seq)))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def spawn(self, *ids: int) -> "RngStream":
        """Child stream keyed by this stream's ids extended with ``ids``."""
        return RngStream(self.seed, self.stream_id + tuple(int(i) for i in ids))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._generator.uniform(low, high, size)

    def normal(self, loc: float = 0.0, scale: float = 1.0, size=None):
        return self._generator.normal(loc, scale, size)

    def integers(self, low: int, high: int = None, size=None):
        return self._generator.integers(low, high, size)

    def choice(self, n: int, p: np.ndarray) -> int:
        """Draw one index from ``range(n)`` with probabilities ``p``."""
        return int(self._generator.choice(n, p=p))

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)
