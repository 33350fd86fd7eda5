"""
Report models for check results.
"""

import json
import logging
import math
from datetime import datetime
from typing import Any, ClassVar, Dict, List, Optional, Type, Union

from errors import InvalidInputError

logger = logging.getLogger(__name__)


class Report:
    """Base class for check reports."""

    # Class variables
    report_type: ClassVar[str] = "report"
    title: ClassVar[str] = "Report"

    _registry: ClassVar[Dict[str, Type['Report']]] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        Report._registry[cls.report_type] = cls

    def __init__(self, verdict: Dict[str, Any], details: Optional[Dict[str, Any]] = None,
                 config: Optional[Dict[str, Any]] = None, generated_at: Optional[str] = None):
        """
        Initialize a report.

        Args:
            verdict: Deterministic outcome fields; must contain 'passed'
            details: Supporting data (samples, failures, tables)
            config: The configuration the report was produced from
            generated_at: ISO timestamp; defaults to now
        """
        if 'passed' not in verdict:
            raise InvalidInputError(f"{self.report_type} verdict must contain 'passed'")
        self.verdict = verdict
        self.details = details or {}
        self.config = config or {}
        self.generated_at = generated_at or datetime.now().isoformat(timespec='seconds')

    @property
    def passed(self) -> bool:
        return bool(self.verdict['passed'])

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert report to dictionary.

        Returns:
            Dictionary representation
        """
        return {
            'report_type': self.report_type,
            'generated_at': self.generated_at,
            'config': self.config,
            'verdict': self.verdict,
            'details': self.details,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(_finite(self.to_dict()), indent=indent, default=_json_default, allow_nan=False)

    @classmethod
    def from_dict(cls, data: Union[str, Dict[str, Any]]) -> 'Report':
        """
        Rebuild a report from to_dict() output or its JSON text.

        Args:
            data: Dictionary or JSON string

        Returns:
            Instance of the subclass named by 'report_type'
        """
        if isinstance(data, str):
            data = json.loads(data)
        report_type = data.get('report_type', cls.report_type)
        target = Report._registry.get(report_type, cls)
        if target is not cls and not issubclass(target, cls):
            logger.warning(f"Report type {report_type} does not match {cls.report_type}")
        return target(data['verdict'], data.get('details'), data.get('config'), data.get('generated_at'))

    def summary_lines(self) -> List[str]:
        return [f"{key}: {value}" for key, value in self.verdict.items() if key != 'passed']

    def __str__(self) -> str:
        status = 'PASS' if self.passed else 'FAIL'
        lines = [f"{self.title}: {status}"]
        lines.extend(f"  {line}" for line in self.summary_lines())
        return '\n'.join(lines)


class RegularityReport(Report):
    """Positive definiteness and classification of a 2D metric or a field of them."""

    report_type: ClassVar[str] = "regularity"
    title: ClassVar[str] = "2D regularity"

    def summary_lines(self) -> List[str]:
        lines = []
        if 'classification' in self.verdict:
            lines.append(f"classification: {self.verdict['classification']}")
        if 'bounds' in self.verdict:
            bounds = self.verdict['bounds']
            lines.append(f"n interval: ]{bounds['lower']:.6g}, {bounds['upper']:.6g}[")
            if bounds.get('critical') is not None:
                lines.append(f"critical value: {bounds['critical']:.6g}")
        if self.verdict.get('witness'):
            witness = self.verdict['witness']
            lines.append(f"witness: {witness['minor']} = {witness['value']:.6g} at y = {tuple(witness['direction'])}")
        if 'points' in self.verdict:
            lines.append(f"grid points: {self.verdict['points']}, failures: {self.verdict['failures']}")
            lines.append(f"classifications: {self.verdict['classifications']}")
            lines.append(f"classification changes: {self.verdict['classification_changes']}")
        return lines


class Check3DReport(Report):
    """Necessary conditions and numeric evidence for a 3D metric."""

    report_type: ClassVar[str] = "check3d"
    title: ClassVar[str] = "3D regularity"

    def summary_lines(self) -> List[str]:
        lines = [f"necessary conditions hold: {self.verdict['necessary_conditions']}"]
        lines.append(f"numeric evidence: min eigenvalue {self.verdict['min_eigenvalue']:.6g} "
                     f"over {self.verdict['directions']} directions (sampling evidence only)")
        return lines


class CurvatureReport(Report):
    """Surface curvature data and constant curvature checks."""

    report_type: ClassVar[str] = "curvature"
    title: ClassVar[str] = "Curvature"

    def summary_lines(self) -> List[str]:
        lines = [f"field: {self.verdict.get('field')}"]
        if self.verdict.get('k') is not None:
            lines.append(f"target K: {self.verdict['k']}, worst residual: {self.verdict.get('worst_residual')}")
        lines.append(f"points: {self.verdict.get('points')}, flagged: {self.verdict.get('flagged')}")
        return lines


class AgreementReport(Report):
    """Interval criterion against the eigenvalue oracle."""

    report_type: ClassVar[str] = "agreement"
    title: ClassVar[str] = "Criterion/oracle agreement"

    def summary_lines(self) -> List[str]:
        return [
            f"samples: {self.verdict['samples']} (seed {self.verdict['seed']})",
            f"compared: {self.verdict['compared']}, skipped near boundary: {self.verdict['skipped']}",
            f"agreements: {self.verdict['agreements']}, disagreements: {self.verdict['disagreements']}",
        ]


class EnergyRelationReport(Report):
    """Hessian of A against the energy-function relation."""

    report_type: ClassVar[str] = "energy"
    title: ClassVar[str] = "Energy relation"

    def summary_lines(self) -> List[str]:
        lines = [f"directions: {self.verdict['directions']}, skipped: {self.verdict.get('skipped', 0)}"]
        if self.verdict['max_residual'] is None:
            lines.append("no direction with A(y) > 0 was checked")
        else:
            lines.append(f"max relative residual: {self.verdict['max_residual']:.3e} (tol {self.verdict['tol']})")
        return lines


class IntervalTableReport(Report):
    """The n-interval table."""

    report_type: ClassVar[str] = "table"
    title: ClassVar[str] = "Interval table"

    def summary_lines(self) -> List[str]:
        return [f"cells: {self.verdict['cells']}, blank: {self.verdict['blank']}"]


def _finite(value):
    """Copy of value with NaN and infinities replaced by None, so the JSON stays strict."""
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if hasattr(value, 'tolist'):
        return _finite(value.tolist())
    return value


def _json_default(value):
    if hasattr(value, 'to_dict'):
        return _finite(value.to_dict())
    return str(value)
