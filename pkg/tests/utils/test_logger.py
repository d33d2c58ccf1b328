"""
Unit Tests for the Logging Utility

Tests logger naming, the run log file and verbosity levels.
"""

import logging
import logging.handlers

from grasp_marl.utils.logger import (
    disable_file_logging, enable_file_logging, get_log_info, get_logger, log_suite_result, set_verbosity
)


def _console_levels(logger):
    return [h.level for h in logger.handlers if not isinstance(h, logging.handlers.RotatingFileHandler)]


class TestLoggerManager:
    """Test the package-wide logger registry."""

    def test_logger_name_uses_last_module_part(self):
        """Test the application prefix and non-propagation."""
        logger = get_logger("grasp_marl.services.trainer")
        assert logger.name == "GRASP-MARL.trainer"
        assert logger.propagate is False
        assert get_logger("trainer") is logger

    def test_run_log_file(self, temp_dir):
        """Test that messages reach the run log inside the output directory."""
        enable_file_logging(temp_dir)
        try:
            info = get_log_info()
            assert info["file_logging_enabled"] is True
            assert info["current_log_file"].endswith("run.log")
            log_suite_result("qp", False, "2/3 cases")
        finally:
            disable_file_logging()
        assert "Suite qp: FAIL - 2/3 cases" in (temp_dir / "run.log").read_text()
        assert get_log_info()["current_log_file"] is None

    def test_verbosity_levels(self):
        """Test the verbosity to console level mapping."""
        logger = get_logger("verbosity_levels")
        try:
            set_verbosity(0)
            assert _console_levels(logger) == [logging.WARNING]
            set_verbosity(2)
            assert _console_levels(logger) == [logging.DEBUG]
        finally:
            set_verbosity(1)
        assert _console_levels(logger) == [logging.INFO]
