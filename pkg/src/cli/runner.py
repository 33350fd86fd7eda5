"""
Command runner: turns a metric config and settings into reports.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from cli.formatting import (
    CURVATURE_COLUMNS, ENERGY_COLUMNS, interval_frame, interval_text, samples_frame,
)
from config.metric_config import MetricConfig
from errors import ConfigError, DomainError, SymFinslerError
from finsler.fields import check_field, scan_field
from finsler.pd2d import (
    classify, definiteness_polynomial, det_hessian_coeffs, find_witness, interval_table,
    is_positive_definite, necessary_conditions, palindromic_quartic,
)
from finsler.pd3d import (
    base_matrix_minors, det_coeffs, minor2_coeffs, necessary_conditions_3d, numeric_pd_check_3d,
)
from oracle.checks import agreement_harness, energy_relation_check, min_eigenvalue_on_sphere
from oracle.sampling import DirectionSampler
from polynomial.exprfield import ScalarField
from reports.archive import ReportArchive
from reports.models import (
    AgreementReport, Check3DReport, CurvatureReport, EnergyRelationReport, IntervalTableReport,
    RegularityReport, Report,
)
from riemann.surface import (
    EXACT, SymmetricSecondRoot, constant_curvature_solution, curvature,
    grid_points, random_points, regularity_error, verify_constant_curvature,
)

logger = logging.getLogger(__name__)

DEFAULT_CURVATURE_SAMPLES = 50
DEFAULT_ENERGY_DIRECTIONS = 100
FD_CURVATURE_TOL = 1e-5


@dataclass
class CommandResult:
    """A report plus the optional table and text block a command produces."""

    report: Report
    table: Optional[pd.DataFrame] = None
    text: str = ''

    @property
    def exit_code(self) -> int:
        return 0 if self.report.passed else 1


class CheckRunner:
    """
    Runs the toolkit's checks with the tolerances and sample sizes from settings.
    """

    def __init__(self, settings: Dict[str, Any]):
        """
        Initialize the runner.

        Args:
            settings (dict): Loaded application settings. Uses the sections
                oracle, tolerances, table, reports and witness.
        """
        self.oracle = settings['oracle']
        self.tolerances = settings['tolerances']
        self.table_settings = settings['table']
        self.witness_directions = settings['witness']['coarse_directions']

        archive_dir = settings['reports'].get('archive_dir')
        self.archive = ReportArchive(archive_dir, settings['reports'].get('keep_latest', True)) if archive_dir else None

    def _finish(self, result: CommandResult) -> CommandResult:
        if self.archive is not None:
            self.archive.save(result.report)
        return result

    @staticmethod
    def _require_grid(config: MetricConfig) -> Tuple[Dict[str, List[float]], List[int]]:
        if config.region is None or config.grid is None:
            raise ConfigError("region/grid: required for non-constant coefficients")
        if len(config.region['min']) != 2 or len(config.grid) != 2:
            raise ConfigError("region/grid: need exactly two axes")
        return config.region, config.grid

    def check2d(self, config: MetricConfig) -> CommandResult:
        """
        Positive definiteness, classification and supporting data for a 2D metric.

        Non-constant coefficient fields are checked at every grid node instead.
        """
        if config.dimension != 2:
            raise ConfigError(f"dimension: check2d needs a 2D config, got {config.dimension}")
        config.require_coefficients()
        if not config.is_constant:
            return self.classify_field(config)

        c = config.coefficient_set()
        check = is_positive_definite(c)
        classification = classify(c, self.tolerances['critical_snap'], find_failure=False)
        witness = None if check.positive_definite else find_witness(c, self.witness_directions)
        polynomial = definiteness_polynomial(c)
        palindromic, roots = palindromic_quartic(c)
        verdict = {
            'passed': check.positive_definite,
            'coefficients': c.to_dict(),
            'classification': classification.verdict.value,
            'bounds': check.bounds.to_dict(),
            'witness': witness.to_dict() if witness else None,
        }
        details = {
            'necessary_conditions': necessary_conditions(c).to_dict(),
            'boundary_distance': check.boundary_distance,
            'reason': check.reason,
            'definiteness_polynomial': polynomial.to_dict(),
            'det_hessian': det_hessian_coeffs(c).to_dict(),
            'det_real_roots': roots,
            'palindromic_coefficients': [float(v) for v in palindromic],
        }
        logger.info(f"check2d {c}: {classification.verdict.value}")
        return self._finish(CommandResult(RegularityReport(verdict, details, config.to_dict())))

    def classify_field(self, config: MetricConfig) -> CommandResult:
        """Grid classification map of a 2D coefficient field; the scan is returned as the table."""
        if config.dimension != 2:
            raise ConfigError(f"dimension: classify-field needs a 2D config, got {config.dimension}")
        region, grid = self._require_grid(config)
        fields = config.monomial_fields()
        scan = scan_field(fields, region, grid)
        report = check_field(fields, region, grid, config.to_dict(), scan=scan)
        return self._finish(CommandResult(report, table=scan))

    def check3d(self, config: MetricConfig, samples: Optional[int] = None) -> CommandResult:
        """
        Necessary conditions plus sampled eigenvalue evidence for a 3D metric.

        Non-constant coefficients are checked at each configured point.
        """
        if config.dimension != 3:
            raise ConfigError(f"dimension: check3d needs a 3D config, got {config.dimension}")
        config.require_coefficients()
        if config.is_constant:
            positions: List[Optional[Sequence[float]]] = [None]
        elif config.points:
            positions = list(config.points)
        else:
            raise ConfigError("points: non-constant 3D coefficients need explicit points")

        sampler = DirectionSampler(3, samples or self.oracle['directions_3d'])
        checks = []
        for position in positions:
            c = config.coefficient_set(position)
            conditions = necessary_conditions_3d(c)
            evidence = numeric_pd_check_3d(c, sampler=sampler)
            oracle = min_eigenvalue_on_sphere(c, sampler)
            checks.append({
                'position': list(position) if position is not None else None,
                'coefficients': c.to_dict(),
                'necessary_conditions': conditions.to_dict(),
                'base_matrix_minors': [float(v) for v in base_matrix_minors(c)],
                'minor2': minor2_coeffs(c).to_dict(),
                'det': det_coeffs(c).to_dict(),
                'evidence': evidence.to_dict(),
                'oracle': oracle.to_dict(),
                'passed': conditions.all_hold and evidence.positive_evidence and oracle.positive,
            })

        verdict = {
            'passed': all(check['passed'] for check in checks),
            'necessary_conditions': all(check['necessary_conditions']['all_hold'] for check in checks),
            'min_eigenvalue': min(check['oracle']['min_eigenvalue'] for check in checks),
            'directions': len(sampler),
            'certified': False,
        }
        return self._finish(CommandResult(Check3DReport(verdict, {'checks': checks}, config.to_dict())))

    def table(self, l_values: Optional[Sequence[float]] = None, m_values: Optional[Sequence[float]] = None,
              decimals: Optional[int] = None) -> CommandResult:
        """The n-interval table for every (l, |m|) combination."""
        l_values = list(l_values if l_values is not None else self.table_settings['l_values'])
        m_values = list(m_values if m_values is not None else self.table_settings['m_values'])
        decimals = self.table_settings['decimals'] if decimals is None else decimals
        cells = interval_table(l_values, m_values, decimals)
        verdict = {
            'passed': True,
            'cells': len(cells),
            'blank': sum(1 for cell in cells if cell.blank),
            'l_values': l_values,
            'm_values': m_values,
            'decimals': decimals,
        }
        report = IntervalTableReport(verdict, {'cells': [cell.to_dict() for cell in cells]})
        return self._finish(CommandResult(report, table=interval_frame(cells), text=interval_text(cells)))

    def _p_field(self, config: MetricConfig) -> Tuple[ScalarField, Optional[float], Optional[SymmetricSecondRoot]]:
        if config.p is not None:
            return config.p, None, None
        if config.second_root is not None:
            a, b = config.second_root
            metric = SymmetricSecondRoot(a, b)
            return metric.p_field(), None, metric
        if config.branch is not None:
            branch = config.branch
            p = constant_curvature_solution(branch['k'], branch['c1'], branch['c2'], branch['kind'], branch.get('f'))
            return p, branch['k'], None
        raise ConfigError("p: curvature configs need p, a/b or a branch block")

    def _sample_points(self, config: MetricConfig, samples: Optional[int],
                       seed: Optional[int]) -> List[Tuple[float, float]]:
        if config.points:
            return [(point[0], point[1]) for point in config.points]
        if config.region is None:
            raise ConfigError("points: curvature configs need points or a region")
        if config.grid is not None:
            return grid_points(config.region, config.grid)
        count = samples or DEFAULT_CURVATURE_SAMPLES
        return random_points(config.region, count, self.oracle['seed'] if seed is None else seed)

    def curvature(self, config: MetricConfig, k: Optional[float] = None, tol: Optional[float] = None,
                  mode: str = EXACT, samples: Optional[int] = None, seed: Optional[int] = None) -> CommandResult:
        """
        Curvature of the unit-diagonal surface metric at sample points.

        With a target k (from --constant-k, the config or its branch block) the
        constant curvature equation is verified; otherwise the curvature data is
        reported and the command passes when at least one point was evaluated.
        Second-root configs (a, b) fail at any point where a(x) <= 0.
        """
        p, branch_k, metric = self._p_field(config)
        if k is None:
            k = config.k if config.k is not None else branch_k
        points = self._sample_points(config, samples, seed)
        eps = self.tolerances['singular_eps']

        if k is not None:
            if tol is None:
                tol = self.tolerances['curvature'] if mode == EXACT else FD_CURVATURE_TOL
            check = verify_constant_curvature(p, k, points, tol, mode, metric)
            result = check.to_dict()
            samples_data = result.pop('samples')
            verdict = {
                'passed': check.passed,
                'field': result['field'],
                'k': check.k,
                'tol': check.tol,
                'mode': mode,
                'worst_residual': check.worst_residual,
                'worst_position': result['worst_position'],
                'points': len(points),
                'flagged': len(check.flagged),
                'irregular': len(check.irregular),
            }
            report = CurvatureReport(verdict, {'samples': samples_data}, config.to_dict())
            rows = [dict(sample, K=sample['gauss']) for sample in samples_data]
            return self._finish(CommandResult(report, table=samples_frame(rows, CURVATURE_COLUMNS)))

        samples_data = []
        data = []
        irregular = 0
        for x in points:
            reason = regularity_error(metric, x)
            if reason is not None:
                irregular += 1
                samples_data.append({'position': list(x), 'p': None, 'K': None, 'residual': None,
                                     'singular': False, 'error': reason})
                continue
            try:
                result = curvature(p, x, mode, eps)
            except (SymFinslerError, ArithmeticError) as e:
                logger.warning(f"Curvature not available at {x}: {e}")
                samples_data.append({'position': list(x), 'p': None, 'K': None, 'residual': None,
                                     'singular': True, 'error': str(e)})
                continue
            data.append(result.to_dict())
            samples_data.append({'position': list(x), 'p': result.p, 'K': result.gauss, 'residual': None,
                                 'singular': False, 'error': None})
        flagged = sum(1 for sample in samples_data if sample['singular']) + irregular
        verdict = {
            'passed': irregular == 0 and flagged < len(points),
            'field': str(p),
            'k': None,
            'mode': mode,
            'points': len(points),
            'flagged': flagged,
            'irregular': irregular,
        }
        report = CurvatureReport(verdict, {'curvature': data}, config.to_dict())
        return self._finish(CommandResult(report, table=samples_frame(samples_data, CURVATURE_COLUMNS)))

    def oracle_compare(self, config: Optional[MetricConfig] = None, random_samples: Optional[int] = None,
                       seed: Optional[int] = None, directions: Optional[int] = None,
                       margin: Optional[float] = None) -> CommandResult:
        """
        Interval criterion against the eigenvalue oracle.

        Either random_samples coefficient sets in [-10, 10]^3, or the coefficient
        sets of a 2D config (one set, or one per grid node / point for fields).
        """
        sampler = DirectionSampler(2, directions or self.oracle['directions_2d'])
        margin = self.oracle['margin'] if margin is None else margin
        seed = self.oracle['seed'] if seed is None else seed
        if random_samples is not None:
            summary = agreement_harness(random_samples, margin=margin, seed=seed, sampler=sampler)
            echoed: Dict[str, Any] = {'random': random_samples}
        elif config is not None:
            if config.dimension != 2:
                raise ConfigError(f"dimension: oracle-compare needs a 2D config, got {config.dimension}")
            summary = agreement_harness(margin=margin, sampler=sampler, corpus=self._corpus(config))
            echoed = config.to_dict()
        else:
            raise ConfigError("oracle-compare needs a config or --random N")
        report = AgreementReport(summary.to_dict(), {'counterexamples': summary.counterexamples}, echoed)
        return self._finish(CommandResult(report))

    def _corpus(self, config: MetricConfig):
        config.require_coefficients()
        if config.is_constant:
            return [config.coefficient_set()]
        if config.points:
            positions = config.points
        else:
            positions = grid_points(*self._require_grid(config))
        corpus = []
        for position in positions:
            try:
                corpus.append(config.coefficient_set(position))
            except ArithmeticError as e:
                logger.warning(f"Skipping {position}: {e}")
        return corpus

    def energy(self, config: MetricConfig, samples: Optional[int] = None, seed: Optional[int] = None,
               tol: Optional[float] = None) -> CommandResult:
        """
        Check the energy-function relation for the Hessian of A.

        Directions come from the config's points, else random unit directions.
        Directions with A(y) <= 0 are skipped.
        """
        config.require_coefficients()
        c = config.coefficient_set()
        tol = self.tolerances['energy_relation'] if tol is None else tol
        if config.points:
            directions = [np.asarray(point, dtype=float) for point in config.points]
        else:
            rng = np.random.default_rng(self.oracle['seed'] if seed is None else seed)
            raw = rng.normal(size=(samples or DEFAULT_ENERGY_DIRECTIONS, config.dimension))
            directions = list(raw / np.linalg.norm(raw, axis=1, keepdims=True))

        rows = []
        residuals = []
        for y in directions:
            try:
                result = energy_relation_check(c, y, tol, self.oracle['fd_step'])
            except DomainError as e:
                logger.warning(f"Skipping direction {tuple(y)}: {e}")
                rows.append({'direction': [float(v) for v in y], 'residual': None, 'passed': None, 'skipped': True})
                continue
            residuals.append(result.residual)
            rows.append({'direction': list(result.direction), 'residual': result.residual,
                         'passed': result.passed, 'skipped': False})

        max_residual = max(residuals) if residuals else None
        verdict = {
            'passed': bool(residuals) and max_residual <= tol,
            'directions': len(directions),
            'skipped': len(directions) - len(residuals),
            'max_residual': max_residual,
            'tol': tol,
        }
        report = EnergyRelationReport(verdict, {'samples': rows}, config.to_dict())
        return self._finish(CommandResult(report, table=samples_frame(rows, ENERGY_COLUMNS)))
