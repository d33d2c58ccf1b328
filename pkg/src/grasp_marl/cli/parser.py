"""
Argument Parser

``train``, ``verify`` and ``ablate`` subcommands.
"""

import argparse
from typing import Optional

from ..utils.constants import APP_NAME, APP_VERSION, VERIFY_SUITES

SUITE_ALL = "all"


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grasp-marl",
        description=f"{APP_NAME}: consensus-gradient cooperative multi-agent PPO",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    train = commands.add_parser("train", help="train one configuration")
    train.add_argument("--config", required=True, help="JSON run configuration")
    train.add_argument("--seed", type=_non_negative_int, help="override the configured seed")
    train.add_argument("--out", help="override the output directory")
    train.add_argument("--workers", type=_non_negative_int,
                       help="rollout worker threads (0 = one per physical core)")
    train.add_argument("--iterations", type=_non_negative_int, help="override the iteration count")

    verify = commands.add_parser("verify", help="run property verification suites")
    verify.add_argument("--suite", required=True, choices=VERIFY_SUITES + [SUITE_ALL],
                        help="suite to run")
    verify.add_argument("--cases", type=_positive_int, help="number of cases (suite default if omitted)")
    verify.add_argument("--seed", type=_non_negative_int, default=0, help="seed of the case generator")

    ablate = commands.add_parser("ablate", help="train a configuration under several modes and seeds")
    ablate.add_argument("--config", required=True, help="JSON run configuration")
    ablate.add_argument("--seeds", type=_positive_int, default=10, help="number of seeds (0..n-1)")
    ablate.add_argument("--modes", default="grasp,mappo_baseline", help="comma-separated training modes")
    ablate.add_argument("--out", help="override the output directory")
    return parser


def parse_args(argv: Optional[list] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
