"""
Command-line interface.

Argument parsing and the ``train``, ``verify`` and ``ablate`` commands.
"""

from .commands import COMMANDS, cmd_ablate, cmd_train, cmd_verify
from .parser import build_parser

__all__ = [
    "COMMANDS",
    "build_parser",
    "cmd_train",
    "cmd_verify",
    "cmd_ablate",
]
