"""
Unit Tests for Structured Errors
"""

import pytest

from grasp_marl.utils.exceptions import (
    ConfigError, DimensionMismatchError, GraspError, NonFiniteError, NumericAbort
)


class TestExceptions:
    """Test error payloads and messages."""

    def test_dimension_mismatch_payload(self):
        """Test offending indices and dimensions in the message."""
        error = DimensionMismatchError([2], [5], "gradients")
        assert error.indices == (2,)
        assert error.dimensions == (5,)
        assert "#2 has dimension 5" in str(error)

    def test_config_error_message(self):
        """Test the '<key> <constraint>' message form."""
        error = ConfigError("clip_epsilon", "must be > 0")
        assert str(error) == "clip_epsilon must be > 0"
        assert isinstance(error, ValueError)

    def test_numeric_abort(self):
        """Test the quantity and iteration of an aborted step."""
        error = NumericAbort("policy gradient", iteration=7)
        assert error.iteration == 7
        assert "iteration 7" in str(error)
        assert isinstance(error, RuntimeError)

    @pytest.mark.parametrize("error", [
        NonFiniteError("u_star"),
        ConfigError("seed", "must be an integer"),
        NumericAbort("critic loss"),
    ])
    def test_common_base(self, error):
        """Test that every package error shares one base class."""
        assert isinstance(error, GraspError)
