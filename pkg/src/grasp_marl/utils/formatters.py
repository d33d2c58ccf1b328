"""
Formatters

Text formatting utilities for metrics values, durations and reports.
"""

import math
from typing import Any, Dict, List, Sequence


class Formatters:
    """Collection of formatting utilities."""

    @staticmethod
    def format_number(value: Any) -> str:
        """Format a metrics cell: ints verbatim, floats with round-trip precision."""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, int):
            return str(value)
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return repr(number)

    @staticmethod
    def format_duration(seconds: float) -> str:
        """Format duration in human-readable format."""
        if seconds < 1.0:
            return f"{seconds * 1000:.0f}ms"
        if seconds < 60.0:
            return f"{seconds:.1f}s"
        minutes, secs = divmod(int(round(seconds)), 60)
        if minutes < 60:
            return f"{minutes}m {secs}s"
        hours, minutes = divmod(minutes, 60)
        return f"{hours}h {minutes}m"

    @staticmethod
    def format_table(headers: Sequence[str], rows: List[Sequence[Any]]) -> str:
        """Render rows as a left-aligned plain-text table."""
        cells = [[str(h) for h in headers]]
        for row in rows:
            cells.append([
                f"{v:.3e}" if isinstance(v, float) else str(v)
                for v in row
            ])
        widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
        lines = []
        for index, row in enumerate(cells):
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
            if index == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)

    @staticmethod
    def format_mapping(data: Dict[str, Any]) -> str:
        """One ``key=value`` pair per item, comma separated."""
        parts = []
        for key, value in data.items():
            shown = f"{value:.4g}" if isinstance(value, float) else str(value)
            parts.append(f"{key}={shown}")
        return ", ".join(parts)
