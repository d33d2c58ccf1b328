"""
Ablation Runner

Trains one configuration under several modes and seeds and summarises the
final state of every run.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..core.envs import MatrixGameEnv
from ..core.envs.matrix_game import DUMMY_OBSERVATION
from ..models.config import RunConfig
from ..models.metrics import AblationRecord
from ..utils.constants import ABLATION_FILE, MODE_BASELINE, MODE_GRASP
from ..utils.logger import get_logger
from .config_manager import ConfigManager
from .trainer import Trainer

logger = get_logger(__name__)

DEFAULT_ABLATION_MODES = (MODE_GRASP, MODE_BASELINE)


@dataclass
class ModeSummary:
    """Aggregate over the seeds of one mode."""

    mode: str
    runs: int
    mean_final_return: float
    mean_final_u_star_norm: float
    reached_optimum: Optional[int] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            'mode': self.mode,
            'runs': self.runs,
            'mean_final_return': self.mean_final_return,
            'mean_final_u_star_norm': self.mean_final_u_star_norm,
            'reached_optimum': "" if self.reached_optimum is None else self.reached_optimum,
        }


def greedy_joint_action(trainer: Trainer) -> Optional[tuple]:
    """Per-agent argmax action of a trained matrix-game policy."""
    if not isinstance(trainer.env, MatrixGameEnv):
        return None
    return tuple(
        trainer.policy.action_distribution(DUMMY_OBSERVATION, agent, trainer.params).greedy_action
        for agent in range(trainer.env.spec.n_agents)
    )


def run_ablation(config: RunConfig, modes: Sequence[str] = DEFAULT_ABLATION_MODES,
                 seeds: Sequence[int] = tuple(range(10)),
                 output_dir: Union[str, Path, None] = None) -> List[AblationRecord]:
    """
    Train ``config`` once per (mode, seed); runs write under ``<output_dir>/<mode>/seed_<seed>``.

    Raises:
        ConfigError: a mode or seed the schema rejects
        NumericAbort: a run produced non-finite numbers
    """
    base = Path(output_dir or config.output_dir)
    manager = ConfigManager()
    records: List[AblationRecord] = []
    for mode in modes:
        for seed in seeds:
            run_dir = base / mode / f"seed_{seed}"
            run_config = manager.apply_overrides(config, mode=mode, seed=seed, output_dir=str(run_dir))
            trainer = Trainer(run_config, run_dir)
            history = trainer.run()
            last = history[-1] if history else None
            greedy = greedy_joint_action(trainer)
            optimum = None
            if greedy is not None:
                optimum = greedy == trainer.env.optimal_joint_action
            record = AblationRecord(
                mode=mode,
                seed=seed,
                final_mean_return=last.mean_return if last else 0.0,
                final_u_star_norm=last.u_star_norm if last else 0.0,
                greedy_joint_action=greedy,
                reached_optimum=optimum,
            )
            logger.info(f"Ablation {mode} seed {seed}: final return {record.final_mean_return:.6g}"
                        + (f", greedy {greedy}, optimum {optimum}" if greedy is not None else ""))
            records.append(record)
    return records


def summarise(records: Sequence[AblationRecord]) -> List[ModeSummary]:
    """Per-mode mean final return, mean final ||u*|| and optimum count, in first-seen mode order."""
    by_mode: Dict[str, List[AblationRecord]] = {}
    for record in records:
        by_mode.setdefault(record.mode, []).append(record)
    summaries = []
    for mode, group in by_mode.items():
        flags = [r.reached_optimum for r in group if r.reached_optimum is not None]
        summaries.append(ModeSummary(
            mode=mode,
            runs=len(group),
            mean_final_return=float(np.mean([r.final_mean_return for r in group])),
            mean_final_u_star_norm=float(np.mean([r.final_u_star_norm for r in group])),
            reached_optimum=sum(bool(f) for f in flags) if flags else None,
        ))
    return summaries


def write_ablation_csv(records: Sequence[AblationRecord], output_dir: Union[str, Path]) -> Path:
    path = Path(output_dir) / ABLATION_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [r.to_dict() for r in records]
    columns = list(AblationRecord("", 0, 0.0, 0.0).to_dict().keys())
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
    return path
