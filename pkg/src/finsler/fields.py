"""
Grid scans of coefficient fields (l(x), m(x), n(x)) of a 2D fourth-root metric.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from errors import InvalidInputError
from finsler.pd2d import Classification2D, Verdict, classify
from polynomial.exprfield import ScalarField, as_field, evaluate
from polynomial.sympoly import CoefficientSet2D
from reports.models import RegularityReport

logger = logging.getLogger(__name__)

MAX_REPORTED_FAILURES = 100

SCAN_COLUMNS = ['i', 'j', 'x1', 'x2', 'l', 'm', 'n', 'positive_definite', 'verdict', 'boundary_distance', 'error']


def _axes(region: Dict[str, Sequence[float]], grid: Sequence[int]) -> List[np.ndarray]:
    if len(grid) != 2 or any(int(count) < 1 for count in grid):
        raise InvalidInputError(f"Grid needs two positive counts, got {list(grid)}")
    lows, highs = region['min'], region['max']
    if len(lows) != 2 or len(highs) != 2:
        raise InvalidInputError(f"Region needs two bounds per side, got {region}")
    return [np.linspace(float(lo), float(hi), int(count)) for lo, hi, count in zip(lows, highs, grid)]


def scan_field(fields: Tuple[ScalarField, ScalarField, ScalarField], region: Dict[str, Sequence[float]],
               grid: Sequence[int]) -> pd.DataFrame:
    """
    Classify the metric at every node of a grid.

    Args:
        fields: (l, m, n) coefficient fields (numbers and expression strings are accepted)
        region: {'min': [x1, x2], 'max': [x1, x2]}
        grid: Node counts per axis

    Returns:
        DataFrame with one row per node (columns SCAN_COLUMNS); rows whose
        fields could not be evaluated carry the error text and no verdict
    """
    l_field, m_field, n_field = (as_field(f) for f in fields)
    axis1, axis2 = _axes(region, grid)
    cache: Dict[CoefficientSet2D, Classification2D] = {}
    rows = []
    for j, x2 in enumerate(axis2):
        for i, x1 in enumerate(axis1):
            row: Dict[str, Any] = {'i': i, 'j': j, 'x1': float(x1), 'x2': float(x2),
                                   'l': np.nan, 'm': np.nan, 'n': np.nan, 'positive_definite': None,
                                   'verdict': None, 'boundary_distance': np.nan, 'error': None}
            try:
                values = [evaluate(f, (x1, x2)) for f in (l_field, m_field, n_field)]
            except ArithmeticError as e:
                logger.warning(f"Field evaluation failed at ({x1}, {x2}): {e}")
                row['error'] = str(e)
                rows.append(row)
                continue
            row['l'], row['m'], row['n'] = values
            if not all(np.isfinite(values)):
                logger.warning(f"Field evaluation produced a non-finite value at ({x1}, {x2}): {values}")
                row['error'] = 'non-finite coefficient'
                rows.append(row)
                continue
            coefficients = CoefficientSet2D(*values)
            if coefficients not in cache:
                cache[coefficients] = classify(coefficients, find_failure=False)
            classification = cache[coefficients]
            distance = min(values[2] - classification.bounds.lower, classification.bounds.upper - values[2])
            row['positive_definite'] = classification.verdict.positive_definite
            row['verdict'] = classification.verdict.value
            row['boundary_distance'] = distance
            rows.append(row)
    return pd.DataFrame(rows, columns=SCAN_COLUMNS)


def classification_changes(scan: pd.DataFrame) -> int:
    """Number of horizontally or vertically adjacent node pairs whose verdicts differ."""
    table = scan.pivot(index='j', columns='i', values='verdict').to_numpy(dtype=object)
    changes = 0
    for a, b in ((table[:, 1:], table[:, :-1]), (table[1:, :], table[:-1, :])):
        known = pd.notna(a) & pd.notna(b)
        changes += int(np.sum(known & (a != b)))
    return changes


def check_field(fields: Tuple[ScalarField, ScalarField, ScalarField], region: Dict[str, Sequence[float]],
                grid: Sequence[int], config: Optional[Dict[str, Any]] = None,
                scan: Optional[pd.DataFrame] = None) -> RegularityReport:
    """
    Global verdict of a coefficient field over a grid.

    A scan already produced by scan_field for the same arguments can be passed in.

    Returns:
        RegularityReport that passes iff every node is positive definite and
        no evaluation failed; failures and classification counts are reported
    """
    if scan is None:
        scan = scan_field(fields, region, grid)
    errors = scan[scan['error'].notna()]
    failing = scan[scan['positive_definite'].eq(False)]

    failures: List[Dict[str, Any]] = []
    for _, row in failing.head(MAX_REPORTED_FAILURES).iterrows():
        classification = classify(CoefficientSet2D(row['l'], row['m'], row['n']))
        failures.append({
            'position': [row['x1'], row['x2']],
            'coefficients': {'l': row['l'], 'm': row['m'], 'n': row['n']},
            'reason': classification.reason,
            'witness': classification.witness.to_dict() if classification.witness else None,
        })
    for _, row in errors.head(MAX_REPORTED_FAILURES).iterrows():
        failures.append({'position': [row['x1'], row['x2']], 'error': row['error']})

    counts = {verdict.value: int((scan['verdict'] == verdict.value).sum()) for verdict in Verdict}
    passed = len(failing) == 0 and len(errors) == 0
    verdict = {
        'passed': passed,
        'points': int(len(scan)),
        'failures': int(len(failing)),
        'evaluation_errors': int(len(errors)),
        'classifications': counts,
        'classification_changes': classification_changes(scan),
        'fields': [str(as_field(f)) for f in fields],
    }
    logger.info(f"Field check over {len(scan)} grid points: {'PD everywhere' if passed else 'failures found'}")
    return RegularityReport(verdict, {'failures': failures}, config)
