"""
Unit Tests for Formatters Utility
"""

import pytest

from grasp_marl.utils.formatters import Formatters


class TestFormatNumber:
    """Test metrics cell formatting."""

    @pytest.mark.parametrize("value,expected", [
        (3, "3"),
        (0.1, "0.1"),
        (-1e-9, "-1e-09"),
        (float("nan"), "nan"),
        (float("-inf"), "-inf"),
        (True, "true"),
    ])
    def test_values(self, value, expected):
        """Test ints, round-trip floats, non-finite values and booleans."""
        assert Formatters.format_number(value) == expected


class TestFormatDuration:
    """Test duration formatting."""

    @pytest.mark.parametrize("seconds,expected", [
        (0.25, "250ms"),
        (12.34, "12.3s"),
        (125.0, "2m 5s"),
        (3725.0, "1h 2m"),
    ])
    def test_durations(self, seconds, expected):
        """Test each magnitude band."""
        assert Formatters.format_duration(seconds) == expected


class TestFormatTable:
    """Test plain-text tables and key=value summaries."""

    def test_table_layout(self):
        """Test header underline and column alignment."""
        table = Formatters.format_table(["mode", "return"], [["grasp", 1.1], ["mappo_baseline", 0.5]])
        lines = table.splitlines()
        assert lines[0].startswith("mode")
        assert set(lines[1].replace(" ", "")) == {"-"}
        assert lines[2].split() == ["grasp", "1.100e+00"]
        assert lines[2].index("1.100e+00") == lines[0].index("return")

    def test_mapping(self):
        """Test short float rendering in summaries."""
        assert Formatters.format_mapping({"a": 1.23456, "b": 2}) == "a=1.235, b=2"
