"""
Unit Tests for the Verification Suites

Runs every suite at small case counts and checks the report contract.
"""

import numpy as np
import pytest

from grasp_marl.core.estimation import gae
from grasp_marl.models.config import RunConfig
from grasp_marl.services.verification import (
    DEFAULT_CASES, SUITES, barycentric_grid, critic_check_config, critic_convergence_check, forward_gae,
    run_suite
)
from grasp_marl.utils.constants import VERIFY_SUITES


class TestSuiteRegistry:
    """Test suite names and defaults."""

    def test_every_suite_registered(self):
        """Test that defaults and runners cover the same suite names."""
        assert set(DEFAULT_CASES) == set(VERIFY_SUITES)
        assert set(SUITES) == set(VERIFY_SUITES)

    def test_unknown_suite(self):
        """Test that an unknown name is rejected."""
        with pytest.raises(KeyError):
            run_suite("bogus", cases=1)


class TestSuites:
    """Test that each suite passes at a small case count."""

    @pytest.mark.parametrize("name,cases", [
        ("qp", 10),
        ("kkt", 20),
        ("gamma_factor", 30),
        ("gradcheck", 5),
        ("gae", 50),
        ("margin", 5),
    ])
    def test_suite_passes(self, name, cases):
        """Test a passing report with at least the requested number of cases."""
        report = run_suite(name, cases=cases, seed=0)
        assert report.suite == name
        assert report.passed, str(report)
        assert report.cases_run >= cases
        assert report.cases_passed == report.cases_run
        assert report.to_dict()["pass"] is True

    def test_seeds_are_reproducible(self):
        """Test identical residuals for one seed."""
        first = run_suite("qp", cases=5, seed=2)
        second = run_suite("qp", cases=5, seed=2)
        assert first.worst_residuals == second.worst_residuals

    def test_gamma_factor_suite_on_solver_corpus(self):
        """Test the aligned factor over the qp gradient distribution at the default tolerance."""
        report = run_suite("gamma_factor", cases=300, seed=1)
        assert report.passed, str(report)
        assert report.cases_run == 300

    def test_critic_suite(self):
        """Test critic convergence to the exact state values."""
        report = run_suite("critic", cases=100, seed=0)
        assert report.passed, str(report)
        assert report.worst_residuals["final_max_error"] < 1e-3
        assert len(report.notes) == 1


class TestHelpers:
    """Test the oracles the suites rely on."""

    def test_barycentric_grid(self):
        """Test grid size and that rows lie on the simplex."""
        grid = barycentric_grid(0.5)
        assert grid.shape == (6, 3)
        np.testing.assert_allclose(grid.sum(axis=1), 1.0)
        assert np.all(grid >= 0.0)

    def test_forward_sum_matches_recursion(self):
        """Test the direct sum against the backward recursion across an episode end."""
        deltas = np.array([1.0, 1.0, 1.0])
        terminals = np.array([False, True, False])
        expected = np.array([1.5, 1.0, 1.0])
        np.testing.assert_allclose(forward_gae(deltas, 0.5, 1.0, terminals), expected)
        np.testing.assert_allclose(gae(deltas, 0.5, 1.0, terminals), expected)

    def test_critic_check_config(self):
        """Test the fixed settings of the critic convergence scenario."""
        config = critic_check_config(seed=3)
        assert config.seed == 3
        assert config.env_params.episode_length == 3
        assert config.optimizer == "plain"

    def test_critic_check_needs_matrix_game(self):
        """Test that other environments are refused."""
        with pytest.raises(ValueError):
            critic_convergence_check(RunConfig(env="grid_spread", policy="mlp", critic="mlp"), cycles=1)
