"""
Unit Tests for the Trainer

Tests minibatch splitting, the consensus-augmented actor update, the critic
update, the team-quadratic step and full training runs with their output
files.
"""

from dataclasses import replace

import numpy as np
import pytest

from grasp_marl.core.consensus import geometric_aligned_direction
from grasp_marl.core.envs import GridSpreadEnv, MatrixGameEnv, make_team_quadratic
from grasp_marl.core.estimation import critic_loss
from grasp_marl.core.numerics import RngStream
from grasp_marl.core.optimizers import PlainOptimizer
from grasp_marl.core.policy import SharedMlpPolicy, read_checkpoint
from grasp_marl.models.config import TrainConfig
from grasp_marl.models.metrics import IterationMetrics
from grasp_marl.services.ablation import greedy_joint_action
from grasp_marl.services.metrics_writer import read_metrics
from grasp_marl.services.rollout import collect_rollouts
from grasp_marl.services.trainer import (
    Trainer, build_policy, local_gradients, minibatch_indices, ppo_actor_update, ppo_critic_update,
    quadratic_step, zero_consensus
)
from grasp_marl.utils.exceptions import ConfigError, DimensionMismatchError, NonFiniteError, NumericAbort


@pytest.fixture
def plain_config(coordination_config):
    """Single-epoch plain-step variant for exact update arithmetic."""
    return replace(coordination_config, optimizer="plain", ppo_epochs=1, learning_rate=0.1)


def _batch(trainer):
    return collect_rollouts(trainer.policy, trainer.params, trainer.critic, trainer.phi, trainer.config,
                            trainer.root, 0)


class TestBuilders:
    """Test policy construction from configuration."""

    def test_tabular_needs_enumerable_observations(self):
        """Test that grid observations refuse a tabular policy."""
        spec = GridSpreadEnv(n_agents=2, width=3, episode_length=4).spec
        with pytest.raises(ConfigError):
            build_policy(TrainConfig(policy="tabular"), spec)

    def test_mlp_on_matrix_game(self):
        """Test one-hot inputs for an MLP policy on a matrix game."""
        spec = MatrixGameEnv([[1.0, 0.0], [0.0, 1.0]]).spec
        policy = build_policy(TrainConfig(policy="mlp", hidden_width=3), spec)
        assert isinstance(policy, SharedMlpPolicy)
        assert policy.n_observations == 1


class TestMinibatches:
    """Test minibatch index partitions."""

    def test_single_minibatch_keeps_order(self):
        """Test time order with one minibatch."""
        parts = minibatch_indices(5, 1, RngStream(0), 0, 0)
        assert len(parts) == 1
        np.testing.assert_array_equal(parts[0], np.arange(5))

    def test_shuffled_partition(self):
        """Test a seeded partition of every index."""
        parts = minibatch_indices(10, 3, RngStream(0), 2, 1)
        assert [p.size for p in parts] == [4, 3, 3]
        np.testing.assert_array_equal(np.sort(np.concatenate(parts)), np.arange(10))
        again = minibatch_indices(10, 3, RngStream(0), 2, 1)
        assert all(np.array_equal(a, b) for a, b in zip(parts, again))


class TestActorUpdate:
    """Test the clipped-surrogate update with the consensus term."""

    def test_consensus_term_shifts_every_head(self, plain_config, temp_dir):
        """Test that grasp differs from the baseline by lr * u on each head block."""
        trainer = Trainer(plain_config, temp_dir)
        batch = _batch(trainer)
        u = np.array([0.3, -0.2])
        grasp, _ = ppo_actor_update(trainer.policy, trainer.params, batch, u, plain_config, PlainOptimizer(0.1))
        baseline_config = replace(plain_config, mode="mappo_baseline")
        baseline, _ = ppo_actor_update(trainer.policy, trainer.params, batch, u, baseline_config,
                                       PlainOptimizer(0.1))
        for agent in range(2):
            np.testing.assert_allclose(grasp.head(agent) - baseline.head(agent), 0.1 * u, atol=1e-12)

    def test_coefficient_scales_consensus(self, plain_config, temp_dir):
        """Test the consensus coefficient on the head shift."""
        trainer = Trainer(plain_config, temp_dir)
        batch = _batch(trainer)
        u = np.array([1.0, 1.0])
        half = replace(plain_config, consensus_coefficient=0.5)
        full, _ = ppo_actor_update(trainer.policy, trainer.params, batch, u, plain_config, PlainOptimizer(0.1))
        scaled, _ = ppo_actor_update(trainer.policy, trainer.params, batch, u, half, PlainOptimizer(0.1))
        np.testing.assert_allclose(full.head(0) - scaled.head(0), 0.05 * u, atol=1e-12)

    def test_aligned_mode_direction(self, plain_config, temp_dir):
        """Test the aligned direction on every head block."""
        config = replace(plain_config, mode="grasp_aligned")
        trainer = Trainer(config, temp_dir)
        batch = _batch(trainer)
        gradients = local_gradients(batch, trainer.policy, trainer.params)
        u = np.array([0.2, 0.1])
        updated, _ = ppo_actor_update(trainer.policy, trainer.params, batch, u, config, PlainOptimizer(0.1),
                                      gradients)
        for agent in range(2):
            expected = 0.1 * geometric_aligned_direction(gradients[agent], u)
            np.testing.assert_allclose(updated.head(agent) - trainer.params.head(agent), expected, atol=1e-12)

    def test_u_star_dimension(self, plain_config, temp_dir):
        """Test that u* must match the head-block dimension."""
        trainer = Trainer(plain_config, temp_dir)
        with pytest.raises(DimensionMismatchError):
            ppo_actor_update(trainer.policy, trainer.params, _batch(trainer), np.zeros(5), plain_config,
                             PlainOptimizer(0.1))

    def test_stats_at_behaviour_policy(self, plain_config, temp_dir):
        """Test that one epoch at the behaviour policy reports the mean advantage and no clipping."""
        trainer = Trainer(plain_config, temp_dir)
        batch = _batch(trainer)
        _, stats = ppo_actor_update(trainer.policy, trainer.params, batch, np.zeros(2), plain_config,
                                    PlainOptimizer(0.1))
        assert stats.surrogate == pytest.approx(float(np.mean(batch.advantages)), abs=1e-9)
        assert stats.clip_fraction == 0.0


class TestCriticUpdate:
    """Test the critic epochs."""

    def test_loss_decreases(self, coordination_config, temp_dir):
        """Test that a plain step lowers the critic loss on its own batch."""
        trainer = Trainer(coordination_config, temp_dir)
        batch = _batch(trainer)
        before, _ = critic_loss(trainer.critic, trainer.phi, batch, coordination_config.critic_clip_epsilon)
        phi, reported = ppo_critic_update(trainer.critic, trainer.phi, batch, coordination_config)
        after, _ = critic_loss(trainer.critic, phi, batch, coordination_config.critic_clip_epsilon)
        assert after < before
        assert reported <= before + 1e-12


class TestQuadraticStep:
    """Test exact-gradient steps on the team quadratic."""

    def test_grasp_step_is_ascent(self, quadratic_config):
        """Test a non-negative ascent rate and a non-decreasing objective."""
        problem = make_team_quadratic(quadratic_config)
        theta = problem.initial_theta(RngStream(0, (5,)))
        optimizer = PlainOptimizer(quadratic_config.learning_rate)
        theta_next, gradients, outcome, value, rate = quadratic_step(problem, theta, quadratic_config, optimizer)
        assert gradients.n_agents == 3
        assert rate >= 0.0
        assert problem.value(theta_next) >= value - 1e-12

    def test_baseline_step_is_gradient_ascent(self, quadratic_config):
        """Test that the baseline applies the plain gradient with no consensus solve."""
        config = replace(quadratic_config, mode="mappo_baseline")
        problem = make_team_quadratic(config)
        theta = problem.initial_theta(RngStream(0, (5,)))
        theta_next, gradients, outcome, _, rate = quadratic_step(problem, theta, config, PlainOptimizer(0.15))
        grad = problem.gradient(theta)
        np.testing.assert_allclose(theta_next, theta + 0.15 * grad)
        assert outcome.u_norm == 0.0
        assert outcome.iterations == 0
        assert rate == pytest.approx(float(grad @ grad))


class TestTrainerRuns:
    """Test complete runs and their output files."""

    def test_quadratic_run(self, quadratic_config, temp_dir):
        """Test monotone J, metrics rows, the effective config and the final checkpoint."""
        out = temp_dir / "quadratic_run"
        trainer = Trainer(quadratic_config, out)
        history = trainer.run()
        assert len(history) == 10
        returns = [m.mean_return for m in history]
        assert all(b >= a - 1e-12 for a, b in zip(returns, returns[1:]))
        assert all(m.critic_loss == 0.0 for m in history)
        assert len(read_metrics(out / "metrics.csv")) == 10
        assert (out / "config.json").is_file()
        params = read_checkpoint(out / "checkpoints" / "final.ckpt")
        np.testing.assert_array_equal(params.flat, trainer.theta)
        assert params.n_agents == 3

    def test_checkpoint_interval(self, quadratic_config, temp_dir):
        """Test periodic checkpoints."""
        out = temp_dir / "interval"
        Trainer(replace(quadratic_config, checkpoint_interval=5), out).run()
        names = sorted(p.name for p in (out / "checkpoints").iterdir())
        assert names == ["final.ckpt", "iter_000005.ckpt", "iter_000010.ckpt"]

    def test_zero_iterations(self, quadratic_config, temp_dir):
        """Test a run that only writes its header and configuration."""
        out = temp_dir / "empty"
        history = Trainer(replace(quadratic_config, iterations=0), out).run()
        assert history == []
        assert read_metrics(out / "metrics.csv") == []
        assert not (out / "checkpoints" / "final.ckpt").exists()

    def test_jsonl_metrics(self, quadratic_config, temp_dir):
        """Test the JSON Lines metrics format."""
        out = temp_dir / "jsonl"
        Trainer(replace(quadratic_config, metrics_format="jsonl", iterations=3), out).run()
        rows = read_metrics(out / "metrics.jsonl")
        assert [row["iteration"] for row in rows] == [0, 1, 2]

    def test_rl_runs_are_reproducible(self, coordination_config, temp_dir):
        """Test identical metrics for identical seeds, whatever the worker count."""
        first = Trainer(coordination_config, temp_dir / "a")
        second = Trainer(replace(coordination_config, rollout_workers=2), temp_dir / "b")
        rows_a = [first.run_iteration(i).row() for i in range(3)]
        rows_b = [second.run_iteration(i).row() for i in range(3)]
        assert rows_a == rows_b
        np.testing.assert_array_equal(first.params.flat, second.params.flat)

    def test_baseline_reports_no_consensus(self, coordination_config, temp_dir):
        """Test zero u* and no solver iterations in baseline mode."""
        trainer = Trainer(replace(coordination_config, mode="mappo_baseline"), temp_dir / "baseline")
        history = trainer.run()
        assert all(m.u_star_norm == 0.0 and m.qp_iters == 0 for m in history)
        assert trainer.equilibrium_iteration is None

    def test_baseline_matches_zero_coefficient(self, coordination_config, temp_dir):
        """Test that mappo_baseline and grasp with coefficient 0 write identical metrics."""
        Trainer(replace(coordination_config, mode="mappo_baseline"), temp_dir / "baseline").run()
        Trainer(replace(coordination_config, consensus_coefficient=0.0), temp_dir / "off").run()
        baseline = (temp_dir / "baseline" / "metrics.csv").read_bytes()
        assert baseline == (temp_dir / "off" / "metrics.csv").read_bytes()
        np.testing.assert_array_equal(read_checkpoint(temp_dir / "baseline" / "checkpoints" / "final.ckpt").flat,
                                      read_checkpoint(temp_dir / "off" / "checkpoints" / "final.ckpt").flat)

    def test_aligned_run_never_opposes_any_agent(self, coordination_config, temp_dir, mocker):
        """Test that every applied aligned direction keeps non-negative alignment with g_i and u*."""
        applied = []

        def recording_direction(g_i, u_star):
            v = geometric_aligned_direction(g_i, u_star)
            applied.append((np.asarray(g_i), np.asarray(u_star), v))
            return v

        mocker.patch("grasp_marl.services.trainer.geometric_aligned_direction", side_effect=recording_direction)
        Trainer(replace(coordination_config, mode="grasp_aligned", iterations=5), temp_dir / "aligned").run()
        assert applied
        for g_i, u_star, v in applied:
            assert float(g_i @ v) >= -1e-10
            assert float(u_star @ v) >= -1e-10

    def test_wall_time_recorded_on_request(self, quadratic_config, temp_dir):
        """Test the wall_ms column."""
        timed = Trainer(replace(quadratic_config, record_wall_time=True), temp_dir / "t").run_iteration(0)
        untimed = Trainer(quadratic_config, temp_dir / "u").run_iteration(0)
        assert timed.wall_ms > 0.0
        assert untimed.wall_ms == 0.0

    def test_non_finite_aborts(self, coordination_config, temp_dir, mocker):
        """Test that non-finite numbers become a NumericAbort naming the iteration."""
        trainer = Trainer(coordination_config, temp_dir)
        mocker.patch.object(trainer, "_rl_iteration", side_effect=NonFiniteError("gradient set"))
        with pytest.raises(NumericAbort) as exc_info:
            trainer.run_iteration(4)
        assert exc_info.value.iteration == 4

    def test_non_finite_metric_aborts(self, quadratic_config, temp_dir, mocker):
        """Test that a NaN metric aborts the iteration."""
        trainer = Trainer(quadratic_config, temp_dir)
        bad = IterationMetrics(0, float("nan"), 0.0, 0.0, [0.0] * 3, 0.0, 0.0, 0)
        mocker.patch.object(trainer, "_quadratic_iteration", return_value=bad)
        with pytest.raises(NumericAbort) as exc_info:
            trainer.run_iteration(0)
        assert exc_info.value.quantity == "mean_return"

    def test_zero_consensus(self, gradient_set):
        """Test the switched-off consensus outcome."""
        from grasp_marl.models.consensus import GradientSet
        outcome = zero_consensus(GradientSet.from_vectors(gradient_set), "pgd")
        assert outcome.u_norm == 0.0
        np.testing.assert_allclose(outcome.weights, np.full(4, 0.25))


@pytest.mark.slow
class TestLearning:
    """Test that training finds the coordination optimum."""

    def test_coordination_game_reaches_optimum(self, coordination_config, temp_dir):
        """Test the greedy joint action after training."""
        config = replace(coordination_config, iterations=60, episodes_per_iteration=32)
        trainer = Trainer(config, temp_dir / "learn")
        trainer.run()
        assert greedy_joint_action(trainer) == (0, 0)
