"""
CLI Commands

Each command returns a process exit code: 0 on success, 1 on a runtime or
numeric failure (or a failed verification), 2 on a configuration or usage
error.
"""

import argparse
import sys
from pathlib import Path

from ..models.config import RunConfig
from ..services.ablation import run_ablation, summarise, write_ablation_csv
from ..services.config_manager import ConfigManager
from ..services.metrics_writer import metrics_path
from ..services.trainer import Trainer
from ..services.verification import run_all, run_suite
from ..utils.constants import (
    EXIT_OK, EXIT_RUNTIME_FAILURE, EXIT_USAGE_FAILURE, RUN_LOG_FILE, TRAIN_MODES
)
from ..utils.exceptions import ConfigError, GraspError, NumericAbort
from ..utils.formatters import Formatters
from ..utils.logger import (
    disable_file_logging, enable_file_logging, get_logger, log_error, log_shutdown, log_startup, set_verbosity
)
from .parser import SUITE_ALL

logger = get_logger(__name__)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def load_run_config(path: str, **overrides) -> RunConfig:
    """Parse ``path`` and apply command-line overrides (validated like the file)."""
    manager = ConfigManager()
    config = manager.load_config(path)
    if any(value is not None for value in overrides.values()):
        config = manager.apply_overrides(config, **overrides)
    return config


def cmd_train(args: argparse.Namespace) -> int:
    try:
        config = load_run_config(args.config, seed=args.seed, output_dir=args.out,
                                 rollout_workers=args.workers, iterations=args.iterations)
    except ConfigError as e:
        return _fail(str(e), EXIT_USAGE_FAILURE)

    set_verbosity(config.verbosity)
    output_dir = Path(config.output_dir)
    try:
        enable_file_logging(output_dir, RUN_LOG_FILE)
        log_startup(f"train {config.env} / {config.mode} / seed {config.seed}")
        trainer = Trainer(config, output_dir)
        history = trainer.run()
    except ConfigError as e:
        return _fail(str(e), EXIT_USAGE_FAILURE)
    except NumericAbort as e:
        log_error(f"Training aborted: {e}", exc_info=False, logger_name='training')
        return _fail(str(e), EXIT_RUNTIME_FAILURE)
    except (GraspError, ValueError, OSError) as e:
        log_error(f"Training failed: {e}", logger_name='training')
        return _fail(str(e), EXIT_RUNTIME_FAILURE)
    finally:
        log_shutdown("train finished")
        disable_file_logging()

    print(f"{len(history)} iterations -> {metrics_path(output_dir, config.metrics_format)}")
    if history:
        print(Formatters.format_mapping(history[-1].to_dict()))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        if args.suite == SUITE_ALL:
            reports = run_all(args.cases, args.seed)
        else:
            reports = [run_suite(args.suite, args.cases, args.seed)]
    except KeyError as e:
        return _fail(str(e), EXIT_USAGE_FAILURE)
    except GraspError as e:
        log_error(f"Verification failed: {e}", logger_name='verification')
        return _fail(str(e), EXIT_RUNTIME_FAILURE)

    for report in reports:
        print(report)
        for note in report.notes:
            print(f"  {note}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_RUNTIME_FAILURE


def cmd_ablate(args: argparse.Namespace) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    unknown = [m for m in modes if m not in TRAIN_MODES]
    if not modes or unknown:
        return _fail(f"--modes must name modes from {', '.join(TRAIN_MODES)}", EXIT_USAGE_FAILURE)
    try:
        config = load_run_config(args.config, output_dir=args.out)
    except ConfigError as e:
        return _fail(str(e), EXIT_USAGE_FAILURE)

    set_verbosity(config.verbosity)
    output_dir = Path(config.output_dir)
    try:
        log_startup(f"ablate {config.env} / {','.join(modes)} / {args.seeds} seeds")
        records = run_ablation(config, modes, range(args.seeds), output_dir)
        path = write_ablation_csv(records, output_dir)
    except ConfigError as e:
        return _fail(str(e), EXIT_USAGE_FAILURE)
    except (GraspError, ValueError, OSError) as e:
        log_error(f"Ablation failed: {e}", logger_name='ablation')
        return _fail(str(e), EXIT_RUNTIME_FAILURE)
    finally:
        log_shutdown("ablate finished")

    summaries = summarise(records)
    headers = ["mode", "runs", "mean_final_return", "mean_final_u_star_norm", "reached_optimum"]
    print(Formatters.format_table(headers, [[s.to_dict()[h] for h in headers] for s in summaries]))
    print(f"records -> {path}")
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "verify": cmd_verify,
    "ablate": cmd_ablate,
}
