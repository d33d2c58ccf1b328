"""
GRASP-MARL - Command-Line Entry Point

Dispatches ``python -m grasp_marl`` and the ``grasp-marl`` console script to
the train, verify and ablate commands.
"""

import signal
import sys
from typing import Optional, Sequence

from .cli import COMMANDS, build_parser
from .utils.constants import EXIT_RUNTIME_FAILURE
from .utils.logger import get_logger, log_shutdown

logger = get_logger(__name__)


def signal_handler(signum, frame):
    """Turn SIGTERM into a KeyboardInterrupt so the running command unwinds."""
    logger.warning(f"Signal {signal.Signals(signum).name} received, stopping")
    raise KeyboardInterrupt


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run the selected command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return int(e.code or 0)

    if hasattr(signal, "SIGTERM"):
        signal.signal(signal.SIGTERM, signal_handler)
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        log_shutdown("interrupted")
        print("interrupted", file=sys.stderr)
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    sys.exit(main())
