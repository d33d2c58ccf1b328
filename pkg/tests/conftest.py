"""
Test Configuration and Shared Fixtures

Provides common fixtures, test utilities, and configuration for the GRASP-MARL test suite.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Any, Dict, Generator

import numpy as np
import pytest

# Add src directory to Python path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from grasp_marl.core.numerics import RngStream  # noqa: E402
from grasp_marl.models.config import EnvParams, RunConfig  # noqa: E402
from grasp_marl.utils.logger import disable_file_logging  # noqa: E402


# ============================================================================
# File System Fixtures
# ============================================================================

@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Provide a temporary directory for run outputs."""
    temp_path = Path(tempfile.mkdtemp())
    try:
        yield temp_path
    finally:
        disable_file_logging()
        shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def sample_config_data(temp_dir) -> Dict[str, Any]:
    """A small coordination-game run configuration document."""
    return {
        "env": "matrix_coordination",
        "mode": "grasp",
        "seed": 3,
        "learning_rate": 0.05,
        "critic_learning_rate": 0.05,
        "ppo_epochs": 2,
        "episodes_per_iteration": 8,
        "iterations": 2,
        "output_dir": str(temp_dir / "run"),
        "verbosity": 0,
    }


@pytest.fixture
def config_file(temp_dir, sample_config_data) -> Path:
    """Write the sample configuration document to disk."""
    config_path = temp_dir / "config_in.json"
    with open(config_path, 'w') as f:
        json.dump(sample_config_data, f, indent=2)
    return config_path


@pytest.fixture
def quadratic_config_file(temp_dir) -> Path:
    """A short team-quadratic run configuration on disk."""
    config_path = temp_dir / "quadratic.json"
    with open(config_path, 'w') as f:
        json.dump({
            "env": "team_quadratic",
            "seed": 1,
            "iterations": 5,
            "output_dir": str(temp_dir / "quadratic"),
            "verbosity": 0,
        }, f)
    return config_path


# ============================================================================
# Model Fixtures
# ============================================================================

@pytest.fixture
def coordination_config(temp_dir) -> RunConfig:
    """Coordination game, tabular policy and critic, a few cheap iterations."""
    return RunConfig(
        env="matrix_coordination",
        seed=0,
        env_params=EnvParams(episode_length=1, n_agents=2),
        learning_rate=0.05,
        critic_learning_rate=0.05,
        ppo_epochs=2,
        episodes_per_iteration=8,
        iterations=3,
        output_dir=str(temp_dir / "coordination"),
        verbosity=0,
    )


@pytest.fixture
def quadratic_config(temp_dir) -> RunConfig:
    """Team-quadratic preset with its resolved defaults."""
    return RunConfig(
        env="team_quadratic",
        seed=0,
        env_params=EnvParams(n_agents=3, dim_per_agent=4),
        learning_rate=0.15,
        optimizer="plain",
        iterations=10,
        output_dir=str(temp_dir / "quadratic"),
        verbosity=0,
    )


@pytest.fixture
def rng() -> RngStream:
    """Deterministic random stream for case generation."""
    return RngStream(1234, (99,))


# ============================================================================
# Test Data Generators
# ============================================================================

@pytest.fixture
def gradient_set(rng) -> np.ndarray:
    """Uniform random gradient matrix of 4 agents in 6 dimensions."""
    return rng.uniform(-1.0, 1.0, size=(4, 6))


# ============================================================================
# Markers Configuration
# ============================================================================

def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "slow: Slow tests")


def pytest_collection_modifyitems(config, items):
    """Automatically mark tests based on location."""
    for item in items:
        if "integration" in item.nodeid:
            item.add_marker(pytest.mark.integration)
        else:
            item.add_marker(pytest.mark.unit)
