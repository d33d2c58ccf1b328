"""
Unit Tests for the Ablation Runner
"""

import csv
from dataclasses import replace

import pytest

from grasp_marl.models.metrics import AblationRecord
from grasp_marl.services.ablation import (
    DEFAULT_ABLATION_MODES, greedy_joint_action, run_ablation, summarise, write_ablation_csv
)
from grasp_marl.services.trainer import Trainer


class TestRunAblation:
    """Test mode-by-seed training runs."""

    def test_records_and_run_directories(self, coordination_config, temp_dir):
        """Test one record and one output directory per (mode, seed)."""
        config = replace(coordination_config, iterations=2)
        records = run_ablation(config, seeds=[0, 1], output_dir=temp_dir / "ablation")
        assert [(r.mode, r.seed) for r in records] == [
            ("grasp", 0), ("grasp", 1), ("mappo_baseline", 0), ("mappo_baseline", 1)
        ]
        for record in records:
            run_dir = temp_dir / "ablation" / record.mode / f"seed_{record.seed}"
            assert (run_dir / "metrics.csv").is_file()
            assert (run_dir / "config.json").is_file()
            assert len(record.greedy_joint_action) == 2
            assert isinstance(record.reached_optimum, bool)
        assert all(r.final_u_star_norm == 0.0 for r in records if r.mode == "mappo_baseline")

    def test_quadratic_has_no_greedy_action(self, quadratic_config, temp_dir):
        """Test empty greedy cells for the team quadratic."""
        config = replace(quadratic_config, iterations=2)
        records = run_ablation(config, modes=["grasp"], seeds=[0], output_dir=temp_dir / "q")
        assert records[0].greedy_joint_action is None
        assert records[0].to_dict()["greedy_joint_action"] == ""
        assert summarise(records)[0].reached_optimum is None

    def test_greedy_joint_action(self, coordination_config, quadratic_config, temp_dir):
        """Test the argmax joint action of an untrained tabular policy."""
        assert greedy_joint_action(Trainer(coordination_config, temp_dir / "m")) == (0, 0)
        assert greedy_joint_action(Trainer(quadratic_config, temp_dir / "q")) is None

    def test_default_modes(self):
        """Test the default mode pair."""
        assert DEFAULT_ABLATION_MODES == ("grasp", "mappo_baseline")


class TestSummaries:
    """Test per-mode aggregation and the CSV file."""

    @pytest.fixture
    def records(self):
        return [
            AblationRecord("grasp", 0, 1.0, 0.0, (0, 0), True),
            AblationRecord("grasp", 1, 0.5, 0.2, (1, 1), False),
            AblationRecord("mappo_baseline", 0, 0.25, 0.0, (1, 1), False),
        ]

    def test_summarise(self, records):
        """Test means and optimum counts in first-seen mode order."""
        grasp, baseline = summarise(records)
        assert grasp.mode == "grasp"
        assert grasp.runs == 2
        assert grasp.mean_final_return == pytest.approx(0.75)
        assert grasp.mean_final_u_star_norm == pytest.approx(0.1)
        assert grasp.reached_optimum == 1
        assert baseline.reached_optimum == 0
        assert baseline.to_dict()["runs"] == 1

    def test_csv(self, records, temp_dir):
        """Test header and joint-action cells of ablation.csv."""
        path = write_ablation_csv(records, temp_dir / "out")
        assert path.name == "ablation.csv"
        with open(path, newline='') as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 3
        assert list(rows[0]) == ["mode", "seed", "final_mean_return", "final_u_star_norm",
                                 "greedy_joint_action", "reached_optimum"]
        assert rows[0]["greedy_joint_action"] == "0-0"
        assert rows[1]["reached_optimum"] == "False"
