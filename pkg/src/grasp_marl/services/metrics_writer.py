"""
Metrics Writer

Append-only per-iteration metrics in CSV or JSON Lines, flushed after every
row so an interrupted run leaves a readable prefix.
"""

import csv
import json
from pathlib import Path
from typing import IO, Any, List, Optional, Union

from ..models.metrics import IterationMetrics
from ..utils.constants import METRICS_CSV, METRICS_FILE_STEM, METRICS_FORMATS, METRICS_JSONL
from ..utils.formatters import Formatters


def metrics_path(output_dir: Union[str, Path], fmt: str) -> Path:
    """``<output_dir>/metrics.csv`` or ``<output_dir>/metrics.jsonl``."""
    if fmt not in METRICS_FORMATS:
        raise ValueError(f"Unknown metrics format: {fmt}")
    return Path(output_dir) / f"{METRICS_FILE_STEM}.{fmt}"


class MetricsWriter:
    """Writes IterationMetrics rows in the fixed column order."""

    def __init__(self, output_dir: Union[str, Path], fmt: str, n_agents: int):
        self.path = metrics_path(output_dir, fmt)
        self.fmt = fmt
        self.columns = IterationMetrics.columns(n_agents)
        self.rows_written = 0
        self._file: Optional[IO[str]] = None
        self._csv = None

    def open(self) -> 'MetricsWriter':
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, 'w', encoding='utf-8', newline='')
        if self.fmt == METRICS_CSV:
            self._csv = csv.writer(self._file, lineterminator='\n')
            self._csv.writerow(self.columns)
            self._file.flush()
        return self

    def write(self, metrics: IterationMetrics):
        if self._file is None:
            raise RuntimeError("MetricsWriter is not open")
        row = metrics.row()
        if len(row) != len(self.columns):
            raise ValueError(f"Metrics row has {len(row)} values, expected {len(self.columns)}")
        if self.fmt == METRICS_JSONL:
            record = {name: _json_value(value) for name, value in zip(self.columns, row)}
            self._file.write(json.dumps(record) + "\n")
        else:
            self._csv.writerow([Formatters.format_number(value) for value in row])
        self._file.flush()
        self.rows_written += 1

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None
            self._csv = None

    def __enter__(self) -> 'MetricsWriter':
        return self.open()

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
        return False


def _json_value(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return int(value)
    return float(value)


def read_metrics(path: Union[str, Path]) -> List[dict]:
    """Rows of a metrics file as dictionaries (CSV values stay strings)."""
    path = Path(path)
    with open(path, 'r', encoding='utf-8', newline='') as f:
        if path.suffix == f".{METRICS_JSONL}":
            return [json.loads(line) for line in f if line.strip()]
        return list(csv.DictReader(f))
