"""
Text and CSV rendering for command results.
"""

import logging
from typing import Any, Dict, Iterable, List, Sequence

import pandas as pd

from finsler.pd2d import IntervalCell, format_bound
from reports.models import Report

logger = logging.getLogger(__name__)

INTERVAL_COLUMNS = ['m', 'l', 'lower', 'upper', 'interval']
CURVATURE_COLUMNS = ['x1', 'x2', 'p', 'K', 'residual', 'singular', 'error']
ENERGY_COLUMNS = ['y1', 'y2', 'y3', 'residual', 'passed', 'skipped']


def interval_frame(cells: Iterable[IntervalCell]) -> pd.DataFrame:
    """One row per table cell; blank cells keep empty bounds and an empty interval."""
    rows = [{'m': cell.m, 'l': cell.l, 'lower': cell.lower, 'upper': cell.upper, 'interval': cell.display}
            for cell in cells]
    return pd.DataFrame(rows, columns=INTERVAL_COLUMNS)


def interval_text(cells: Sequence[IntervalCell]) -> str:
    """
    The interval table as aligned text: one row per |m|, one column per l.
    """
    frame = interval_frame(cells)
    if frame.empty:
        return ''
    grid = frame.pivot(index='m', columns='l', values='interval')
    l_values = list(grid.columns)
    header = ['|m|'] + [f"l={format_bound(l, 2)}" for l in l_values]
    rows = [[format_bound(m, 2)] + [grid.at[m, l] for l in l_values] for m in grid.index]
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]
    lines = ['  '.join(value.ljust(width) for value, width in zip(row, widths)).rstrip()
             for row in [header] + rows]
    return '\n'.join(lines)


def samples_frame(samples: List[Dict[str, Any]], columns: Sequence[str]) -> pd.DataFrame:
    """Flatten per-point sample dicts (with a 'position' or 'direction' list) into columns."""
    rows = []
    for sample in samples:
        row = dict(sample)
        if 'position' in row:
            for name, value in zip(('x1', 'x2'), row.pop('position')):
                row[name] = value
        if 'direction' in row:
            for name, value in zip(('y1', 'y2', 'y3'), row.pop('direction')):
                row[name] = value
        rows.append(row)
    return pd.DataFrame(rows).reindex(columns=list(columns))


def write_csv(frame: pd.DataFrame, path: str):
    """UTF-8 CSV with LF line endings."""
    frame.to_csv(path, index=False, encoding='utf-8', lineterminator='\n')
    logger.info(f"Wrote {len(frame)} rows to {path}")


def render(report: Report, as_json: bool = False, extra: str = '') -> str:
    """
    Text for stdout.

    Args:
        report: Report to print
        as_json: Print the JSON document instead of the summary
        extra: Additional text block printed after the summary (ignored for JSON)
    """
    if as_json:
        return report.to_json()
    text = str(report)
    if extra:
        text = f"{text}\n\n{extra}"
    return text
