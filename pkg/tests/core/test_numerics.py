"""
Unit Tests for Numerics

Tests vector primitives, Gram matrices, simplex projection, power iteration
and the keyed random streams.
"""

import numpy as np
import pytest

from grasp_marl.core.numerics import (
    RngStream, dot, gram_matrix, largest_eigenvalue, norm_sq, project_to_simplex
)
from grasp_marl.utils.exceptions import DimensionMismatchError, EmptyBatchError, NonFiniteError


class TestVectorPrimitives:
    """Test dot products and Gram matrices."""

    def test_dot_and_norm(self):
        """Test inner product and squared norm."""
        assert dot([1.0, 2.0], [3.0, 4.0]) == 11.0
        assert norm_sq([3.0, 4.0]) == 25.0

    def test_dot_dimension_mismatch(self):
        """Test that vectors of different length are rejected."""
        with pytest.raises(DimensionMismatchError):
            dot([1.0, 2.0], [1.0])

    def test_gram_matrix_matches_outer_products(self, gradient_set):
        """Test P = G G^T and exact symmetry."""
        P = gram_matrix(gradient_set)
        np.testing.assert_allclose(P, gradient_set @ gradient_set.T, atol=1e-12)
        assert np.array_equal(P, P.T)

    def test_gram_matrix_is_positive_semidefinite(self, rng):
        """Test non-negative eigenvalues and quadratic forms on random sets."""
        for case in range(20):
            sub = rng.spawn(case)
            G = sub.uniform(-1.0, 1.0, size=(int(sub.integers(2, 17)), int(sub.integers(1, 9))))
            P = gram_matrix(G)
            assert np.array_equal(P, P.T)
            assert np.linalg.eigvalsh(P)[0] >= -1e-10
            c = sub.normal(0.0, 1.0, size=P.shape[0])
            assert float(c @ P @ c) >= -1e-10

    def test_gram_matrix_reports_offending_index(self):
        """Test that the odd-sized gradient is named."""
        with pytest.raises(DimensionMismatchError) as exc_info:
            gram_matrix([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0, 1.0]])
        assert exc_info.value.indices == (2,)
        assert exc_info.value.dimensions == (3,)

    def test_gram_matrix_rejects_nan(self):
        """Test that NaN gradients are rejected."""
        with pytest.raises(NonFiniteError):
            gram_matrix([[1.0, np.nan], [0.0, 1.0]])


class TestSimplexProjection:
    """Test Euclidean projection onto the probability simplex."""

    def test_point_on_simplex_is_fixed(self):
        """Test that a feasible point is returned unchanged."""
        np.testing.assert_allclose(project_to_simplex([0.25, 0.75]), [0.25, 0.75])

    @pytest.mark.parametrize("vector,expected", [
        ([2.0, 0.0], [1.0, 0.0]),
        ([-1.0, -1.0], [0.5, 0.5]),
        ([1.0, 1.0, -5.0], [0.5, 0.5, 0.0]),
    ])
    def test_known_projections(self, vector, expected):
        """Test projections with closed-form answers."""
        np.testing.assert_allclose(project_to_simplex(vector), expected, atol=1e-12)

    def test_random_projections_are_feasible(self, rng):
        """Test non-negativity and unit sum on random inputs."""
        for _ in range(50):
            w = project_to_simplex(rng.normal(0.0, 3.0, size=7))
            assert np.all(w >= 0.0)
            assert abs(w.sum() - 1.0) <= 1e-12

    def test_projection_is_nearest_simplex_point(self, rng):
        """Test that no random simplex point lies closer to the input than its projection."""
        for case in range(20):
            sub = rng.spawn(case)
            y = sub.normal(0.0, 2.0, size=5)
            distance = float(np.linalg.norm(project_to_simplex(y) - y))
            for z in sub.generator.dirichlet(np.ones(5), size=200):
                assert distance <= float(np.linalg.norm(z - y)) + 1e-12

    def test_empty_and_non_finite(self):
        """Test rejected inputs."""
        with pytest.raises(EmptyBatchError):
            project_to_simplex([])
        with pytest.raises(NonFiniteError):
            project_to_simplex([np.inf, 0.0])


class TestLargestEigenvalue:
    """Test the power-iteration estimate."""

    def test_diagonal_matrix(self):
        """Test the dominant eigenvalue of a diagonal matrix."""
        assert largest_eigenvalue(np.diag([3.0, 1.0])) == pytest.approx(3.0, rel=1e-9)

    def test_zero_matrix(self):
        """Test the degenerate all-zero case."""
        assert largest_eigenvalue(np.zeros((3, 3))) == 0.0

    def test_never_below_diagonal(self, gradient_set):
        """Test that the estimate bounds every diagonal entry of a Gram matrix."""
        P = gradient_set @ gradient_set.T
        assert largest_eigenvalue(P) >= np.max(np.diag(P))


class TestRngStream:
    """Test keyed random streams."""

    def test_same_key_same_draws(self):
        """Test reproducibility for identical (seed, stream) keys."""
        a = RngStream(7, (1, 2)).uniform(size=5)
        b = RngStream(7, (1, 2)).uniform(size=5)
        assert np.array_equal(a, b)

    def test_distinct_keys_differ(self):
        """Test that different stream ids give different draws."""
        a = RngStream(7, (1, 2)).uniform(size=5)
        b = RngStream(7, (1, 3)).uniform(size=5)
        c = RngStream(8, (1, 2)).uniform(size=5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_spawn_extends_key(self):
        """Test that spawning is the same as constructing the longer key."""
        spawned = RngStream(5, (2,)).spawn(3, 4)
        assert spawned.stream_id == (2, 3, 4)
        assert np.array_equal(spawned.normal(size=4), RngStream(5, (2, 3, 4)).normal(size=4))

    def test_choice_respects_probabilities(self):
        """Test that a degenerate distribution always yields its support."""
        stream = RngStream(0)
        assert all(stream.choice(3, np.array([0.0, 1.0, 0.0])) == 1 for _ in range(20))
