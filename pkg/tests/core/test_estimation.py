"""
Unit Tests for Advantage Estimation and the Critic

Tests TD errors, GAE, return targets, the value-clipped critic loss and exact
policy evaluation on the matrix-game chain.
"""

import numpy as np
import pytest

from grasp_marl.core.envs import MatrixGameEnv
from grasp_marl.core.estimation import (
    MlpCritic, TabularCritic, critic_loss, critic_update, exact_state_values, gae,
    normalize_advantages, return_targets, td_errors
)
from grasp_marl.core.optimizers import PlainOptimizer
from grasp_marl.core.policy import PolicyParams, TabularSoftmaxPolicy
from grasp_marl.models.rollout import RolloutBatch
from grasp_marl.utils.constants import CLIMB_PAYOFF, CLIMB_PAYOFF_SCALE
from grasp_marl.utils.exceptions import DimensionMismatchError, EmptyBatchError, UnknownObservationError


def _critic_batch(state_ids, advantages, values_old=None):
    T = len(advantages)
    batch = RolloutBatch.from_samples([np.zeros(T, dtype=np.int64)], np.zeros((1, T)), np.zeros((1, T)),
                                      advantages, values_old)
    batch.state_ids = np.asarray(state_ids, dtype=np.int64)
    return batch


class TestTemporalDifference:
    """Test TD errors, GAE and return targets."""

    def test_td_errors_stop_at_terminal(self):
        """Test that a terminal step does not bootstrap."""
        deltas = td_errors([1.0, 1.0], [0.5, 0.5, 0.5], [False, True], 0.9)
        np.testing.assert_allclose(deltas, [0.95, 0.5])

    def test_td_errors_length_check(self):
        """Test that values must hold T+1 entries."""
        with pytest.raises(DimensionMismatchError):
            td_errors([1.0, 1.0], [0.0, 0.0], [False, False], 0.9)

    def test_gae_resets_at_episode_boundary(self):
        """Test that advantages never flow across a terminal."""
        advantages = gae([1.0, 1.0, 1.0], 0.5, 1.0, [False, True, False])
        np.testing.assert_allclose(advantages, [1.5, 1.0, 1.0])

    def test_gae_lambda_zero_is_td(self):
        """Test that lambda = 0 returns the TD errors."""
        deltas = np.array([0.3, -0.2, 0.7])
        np.testing.assert_allclose(gae(deltas, 0.99, 0.0, [False, False, True]), deltas)

    def test_gae_discounting(self):
        """Test the geometric weights of a single episode."""
        advantages = gae([1.0, 1.0], 0.5, 0.5, [False, True])
        np.testing.assert_allclose(advantages, [1.25, 1.0])

    def test_invalid_discounts(self):
        """Test discount factor ranges."""
        with pytest.raises(ValueError):
            gae([1.0], 1.5, 0.5, [True])
        with pytest.raises(ValueError):
            gae([1.0], 0.5, -0.1, [True])
        with pytest.raises(ValueError, match=r"gamma must lie in \[0,1\)"):
            gae([1.0], 1.0, 0.5, [True])
        with pytest.raises(ValueError, match=r"gamma must lie in \[0,1\)"):
            td_errors([1.0], [0.0, 0.0], [True], 1.0)

    def test_episodes_are_isolated(self, rng):
        """Test that changing one episode's rewards leaves the other episodes' advantages unchanged."""
        terminals = np.array([False, False, True, False, True, False, False, True])
        values = rng.normal(0.0, 1.0, size=terminals.size + 1)
        rewards = rng.normal(0.0, 1.0, size=terminals.size)
        base = gae(td_errors(rewards, values, terminals, 0.9), 0.9, 0.95, terminals)

        perturbed = rewards.copy()
        perturbed[3:5] += rng.normal(0.0, 5.0, size=2)
        changed = gae(td_errors(perturbed, values, terminals, 0.9), 0.9, 0.95, terminals)

        np.testing.assert_array_equal(changed[:3], base[:3])
        np.testing.assert_array_equal(changed[5:], base[5:])
        assert not np.allclose(changed[3:5], base[3:5])

    def test_return_targets(self):
        """Test R = A + V_old."""
        np.testing.assert_allclose(return_targets([1.0, -1.0], [0.5, 0.5]), [1.5, -0.5])
        with pytest.raises(DimensionMismatchError):
            return_targets([1.0], [0.5, 0.5])

    def test_normalize_advantages(self):
        """Test zero mean and unit variance, and the constant-batch case."""
        a = normalize_advantages(np.array([1.0, 2.0, 3.0, 4.0]))
        assert a.mean() == pytest.approx(0.0, abs=1e-12)
        assert a.std() == pytest.approx(1.0)
        np.testing.assert_array_equal(normalize_advantages(np.full(3, 2.0)), np.zeros(3))
        with pytest.raises(EmptyBatchError):
            normalize_advantages(np.array([]))


class TestCriticLoss:
    """Test the value-clipped critic loss."""

    def test_unclipped_loss_and_gradient(self):
        """Test a wide clip band against a hand-computed loss."""
        critic = TabularCritic(1)
        batch = _critic_batch([0, 0], [1.0, 3.0])
        loss, grad = critic_loss(critic, np.zeros(1), batch, 1e6)
        assert loss == pytest.approx(5.0)
        np.testing.assert_allclose(grad, [-4.0])

    def test_clipped_branch_has_zero_gradient(self):
        """Test a value outside the band whose clipped error dominates."""
        critic = TabularCritic(1)
        batch = _critic_batch([0], [2.0], values_old=[0.0])
        loss, grad = critic_loss(critic, np.array([1.0]), batch, 0.1)
        assert loss == pytest.approx(3.61)
        np.testing.assert_array_equal(grad, [0.0])

    def test_tabular_critic_needs_state_ids(self):
        """Test that a batch without state ids is rejected."""
        critic = TabularCritic(2)
        batch = RolloutBatch.from_samples([np.zeros(1, dtype=np.int64)], [[0]], [[0.0]], [1.0])
        with pytest.raises(UnknownObservationError):
            critic_loss(critic, np.zeros(2), batch, 0.2)

    def test_critic_update_plain_and_optimizer(self):
        """Test the plain step and delegation to an optimizer."""
        phi = np.array([1.0, 2.0])
        grad = np.array([1.0, -1.0])
        np.testing.assert_allclose(critic_update(phi, grad, 0.5), [0.5, 2.5])
        np.testing.assert_allclose(critic_update(phi, grad, 0.5, PlainOptimizer(0.1)), [0.9, 2.1])
        with pytest.raises(ValueError):
            critic_update(phi, grad, 0.0)


class TestMlpCritic:
    """Test the MLP critic's backward pass."""

    def test_backward_matches_finite_differences(self, rng):
        """Test the vector-Jacobian product against central differences."""
        critic = MlpCritic(3, hidden_width=5)
        phi = rng.uniform(-1.0, 1.0, critic.layout.size)
        states = rng.normal(size=(6, 3))
        dvalues = rng.normal(size=6)
        analytic = critic.backward(phi, states, dvalues)
        h = 1e-6
        for k in range(phi.size):
            e = np.zeros_like(phi)
            e[k] = h
            numeric = (critic.values(phi + e, states) @ dvalues - critic.values(phi - e, states) @ dvalues) / (2 * h)
            assert numeric == pytest.approx(analytic[k], abs=1e-5)

    def test_input_width_checked(self, rng):
        """Test that state features must match the input width."""
        critic = MlpCritic(3, hidden_width=4)
        with pytest.raises(DimensionMismatchError):
            critic.values(critic.init_params(rng), np.zeros((2, 4)))


class TestExactEvaluation:
    """Test exact state values on the matrix-game chain."""

    def test_uniform_policy_values(self):
        """Test V(t) = r_bar + gamma V(t+1) with V(L) = 0."""
        env = MatrixGameEnv([[1.0, 0.0], [0.0, 0.5]], episode_length=2)
        policy = TabularSoftmaxPolicy(2, 1, 2)
        values = exact_state_values(env, policy, PolicyParams.zeros(policy.layout, 2), 0.5)
        np.testing.assert_allclose(values, [0.5625, 0.375])

    def test_uniform_climb_gradient_lowers_optimal_action(self):
        """Test that the exact return gradient at the uniform climb policy pushes the optimal action down most."""
        env = MatrixGameEnv(np.asarray(CLIMB_PAYOFF) * CLIMB_PAYOFF_SCALE, episode_length=1)
        policy = TabularSoftmaxPolicy(2, 1, 3)
        base = PolicyParams.zeros(policy.layout, 2)
        h = 1e-6
        slopes = []
        for action in range(3):
            up, down = base.copy(), base.copy()
            up.block("head0/logits")[0, action] += h
            down.block("head0/logits")[0, action] -= h
            rise = exact_state_values(env, policy, up, 0.5)[0] - exact_state_values(env, policy, down, 0.5)[0]
            slopes.append(rise / (2 * h))
        np.testing.assert_allclose(slopes, [-0.0962963, -0.0740741, 0.1703704], atol=1e-5)
        assert int(np.argmin(slopes)) == 0
