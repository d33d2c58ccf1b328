"""
Logging Utility

Centralized logging configuration for GRASP-MARL.
Provides console logging plus an optional run log file inside a run's output directory.
"""

import logging
import logging.handlers
import platform
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import psutil

from .constants import (
    APP_NAME, APP_VERSION, DEFAULT_FILE_LOGGING, DEFAULT_LOG_DIR, LOG_BACKUP_COUNT,
    LOG_DATE_FORMAT, LOG_FORMAT, MAX_LOG_FILE_SIZE, RUN_LOG_FILE
)

# verbosity -> console level
_VERBOSITY_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG,
}


class LoggerManager:
    """Manages package-wide logging configuration."""

    _instance: Optional['LoggerManager'] = None
    _loggers: Dict[str, logging.Logger] = {}
    _file_logging_enabled: bool = DEFAULT_FILE_LOGGING
    _log_directory: Path = DEFAULT_LOG_DIR
    _file_handler: Optional[logging.handlers.RotatingFileHandler] = None
    _console_level: int = logging.INFO

    def __new__(cls) -> 'LoggerManager':
        """Singleton pattern implementation."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def get_logger(self, name: str) -> logging.Logger:
        """
        Get or create a logger with the specified name.

        Args:
            name: Logger name (typically module name)

        Returns:
            Configured logger instance
        """
        if name not in self._loggers:
            self._loggers[name] = self._create_logger(name)
        return self._loggers[name]

    def _create_logger(self, name: str) -> logging.Logger:
        logger = logging.getLogger(f"{APP_NAME}.{name}")
        logger.setLevel(logging.DEBUG)
        logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self._console_level)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
        logger.addHandler(console_handler)

        if self._file_logging_enabled and self._file_handler is not None:
            logger.addHandler(self._file_handler)

        # Prevent propagation to root logger
        logger.propagate = False
        return logger

    def enable_file_logging(self, log_dir: Optional[Path] = None, filename: str = RUN_LOG_FILE):
        """
        Route every logger to ``log_dir/filename`` in addition to the console.

        Args:
            log_dir: Directory for the log file (defaults to the package log directory)
            filename: Log file name
        """
        self.disable_file_logging()
        if log_dir is not None:
            self._log_directory = Path(log_dir)
        try:
            self._log_directory.mkdir(parents=True, exist_ok=True)
            handler = logging.handlers.RotatingFileHandler(
                self._log_directory / filename,
                maxBytes=MAX_LOG_FILE_SIZE,
                backupCount=LOG_BACKUP_COUNT,
                encoding='utf-8'
            )
        except OSError as e:
            print(f"Warning: Could not create file handler: {e}", file=sys.stderr)
            return

        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
        self._file_handler = handler
        self._file_logging_enabled = True
        for logger in self._loggers.values():
            logger.addHandler(handler)

    def disable_file_logging(self):
        """Detach and close the run log file."""
        self._file_logging_enabled = False
        if self._file_handler is None:
            return
        for logger in self._loggers.values():
            if self._file_handler in logger.handlers:
                logger.removeHandler(self._file_handler)
        self._file_handler.close()
        self._file_handler = None

    def set_console_level(self, level: int):
        """
        Set console logging level for all loggers.

        Args:
            level: Logging level (e.g., logging.DEBUG, logging.INFO)
        """
        self._console_level = level
        for logger in self._loggers.values():
            for handler in logger.handlers:
                if not isinstance(handler, logging.handlers.RotatingFileHandler):
                    handler.setLevel(level)

    def get_log_directory(self) -> Path:
        return self._log_directory

    def is_file_logging_enabled(self) -> bool:
        return self._file_logging_enabled

    def get_current_log_file(self) -> Optional[Path]:
        if self._file_handler is not None:
            return Path(self._file_handler.baseFilename)
        return None


# Global logger manager instance
_logger_manager = LoggerManager()


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger for the specified module/component.

    Example:
        logger = get_logger(__name__)
        logger.info("Training started")
    """
    # Extract just the module name from full path
    if '.' in name:
        name = name.split('.')[-1]
    return _logger_manager.get_logger(name)


def enable_file_logging(log_dir: Optional[Path] = None, filename: str = RUN_LOG_FILE):
    _logger_manager.enable_file_logging(log_dir, filename)


def disable_file_logging():
    _logger_manager.disable_file_logging()


def set_console_level(level: int):
    _logger_manager.set_console_level(level)


def set_verbosity(verbosity: int):
    """Map verbosity 0/1/2 to WARNING/INFO/DEBUG on the console."""
    level = _VERBOSITY_LEVELS[max(0, min(2, int(verbosity)))]
    _logger_manager.set_console_level(level)


def get_log_info() -> Dict[str, Any]:
    """
    Get current logging configuration information.

    Returns:
        Dictionary with logging configuration details
    """
    current = _logger_manager.get_current_log_file()
    return {
        'file_logging_enabled': _logger_manager.is_file_logging_enabled(),
        'log_directory': str(_logger_manager.get_log_directory()),
        'current_log_file': str(current) if current else None,
        'active_loggers': list(_logger_manager._loggers.keys())
    }


# Convenience functions for quick logging
def log_startup(context: str = ""):
    """Log application startup with a short host summary."""
    logger = get_logger('startup')
    suffix = f" ({context})" if context else ""
    logger.info(f"{APP_NAME} v{APP_VERSION} starting{suffix}")
    logger.debug(
        f"Host: python {platform.python_version()}, "
        f"{psutil.cpu_count(logical=False)} physical / {psutil.cpu_count(logical=True)} logical CPUs, "
        f"{psutil.virtual_memory().available / 2**30:.1f} GiB memory available"
    )


def log_shutdown(reason: str = ""):
    logger = get_logger('shutdown')
    suffix = f": {reason}" if reason else ""
    logger.info(f"{APP_NAME} shutting down{suffix}")


def log_error(message: str, exc_info: bool = True, logger_name: str = 'error'):
    """
    Log an error message with optional exception info.

    Args:
        message: Error message
        exc_info: Include exception traceback
        logger_name: Logger name to use
    """
    logger = get_logger(logger_name)
    logger.error(message, exc_info=exc_info)


def log_iteration(metrics: Any):
    """Log a one-line summary of an ``IterationMetrics`` record."""
    logger = get_logger('training')
    logger.info(
        f"Iteration {metrics.iteration}: mean_return={metrics.mean_return:.6g} "
        f"||u*||={metrics.u_star_norm:.3e} kkt_margin={metrics.kkt_margin:.3e} "
        f"critic_loss={metrics.critic_loss:.4g} qp_iters={metrics.qp_iters}"
    )


def log_suite_result(suite: str, passed: bool, details: str = ""):
    """
    Log a verification suite outcome.

    Args:
        suite: Suite name
        passed: Whether every check in the suite held
        details: Additional details
    """
    logger = get_logger('verification')
    message = f"Suite {suite}: {'PASS' if passed else 'FAIL'}"
    if details:
        message += f" - {details}"
    if passed:
        logger.info(message)
    else:
        logger.warning(message)
