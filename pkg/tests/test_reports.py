"""
Tests for report models and the report archive.
"""

import json
import os
import shutil
import tempfile
import unittest

import numpy as np

import sys

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from errors import InvalidInputError
from reports.archive import ReportArchive
from reports.models import (
    AgreementReport, Check3DReport, CurvatureReport, EnergyRelationReport, IntervalTableReport,
    RegularityReport, Report,
)


class TestReportModels(unittest.TestCase):
    """Test cases for report serialization and formatting."""

    def test_requires_passed(self):
        with self.assertRaises(InvalidInputError):
            RegularityReport({'classification': 'PDReducible'})

    def test_round_trip_keeps_type(self):
        report = Check3DReport({'passed': True, 'necessary_conditions': True, 'min_eigenvalue': 2.5,
                                'directions': 2013}, {'checks': []}, {'coefficients': {'l': 1}})
        rebuilt = Report.from_dict(report.to_json())
        self.assertIsInstance(rebuilt, Check3DReport)
        self.assertEqual(rebuilt.to_dict(), report.to_dict())

    def test_numpy_values_serialize(self):
        report = IntervalTableReport({'passed': True, 'cells': 48, 'blank': 12}, {'bounds': np.array([1.0, 2.0])})
        data = json.loads(report.to_json())
        self.assertEqual(data['details']['bounds'], [1.0, 2.0])
        self.assertEqual(data['report_type'], 'table')

    def test_non_finite_values_become_null(self):
        report = Check3DReport({'passed': False, 'min_eigenvalue': float('nan')},
                               {'minors': np.array([1.0, np.inf]), 'bound': np.float64(-np.inf)})
        data = json.loads(report.to_json(), parse_constant=lambda name: self.fail(f"non-strict constant {name}"))
        self.assertIsNone(data['verdict']['min_eigenvalue'])
        self.assertEqual(data['details']['minors'], [1.0, None])
        self.assertIsNone(data['details']['bound'])

    def test_regularity_text(self):
        report = RegularityReport({
            'passed': False,
            'classification': 'NotPositiveDefinite',
            'bounds': {'lower': 5.4928, 'upper': 24.0, 'critical': 10.25},
            'witness': {'minor': 'det', 'value': -420.0, 'direction': [1, -2]},
        })
        text = str(report)
        self.assertTrue(text.startswith('2D regularity: FAIL'))
        self.assertIn('witness: det = -420 at y = (1, -2)', text)
        self.assertIn('critical value: 10.25', text)

    def test_other_summaries(self):
        curvature = CurvatureReport({'passed': True, 'field': 'p', 'k': 1.0, 'worst_residual': 1e-9,
                                     'points': 4, 'flagged': 0})
        self.assertIn('target K: 1.0', str(curvature))
        agreement = AgreementReport({'passed': True, 'samples': 10, 'seed': 1, 'compared': 9, 'skipped': 1,
                                     'agreements': 9, 'disagreements': 0})
        self.assertIn('skipped near boundary: 1', str(agreement))
        energy = EnergyRelationReport({'passed': False, 'directions': 3, 'skipped': 3, 'max_residual': None,
                                       'tol': 1e-5})
        self.assertIn('no direction with A(y) > 0 was checked', str(energy))
        self.assertTrue(str(energy).startswith('Energy relation: FAIL'))


class TestReportArchive(unittest.TestCase):
    """Test cases for ReportArchive."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.archive = ReportArchive(os.path.join(self.temp_dir, 'reports'))

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _report(self, residual):
        return EnergyRelationReport({'passed': True, 'directions': 1, 'skipped': 0, 'max_residual': residual,
                                     'tol': 1e-5})

    def test_save_and_load_latest(self):
        path = self.archive.save(self._report(1e-8))
        self.assertTrue(os.path.exists(path))
        self.assertTrue(os.path.exists(os.path.join(self.archive.archive_dir, 'energy_latest.json')))
        self.archive.save(self._report(2e-8))
        self.assertEqual(len(self.archive.history('energy')), 2)
        latest = self.archive.load_latest('energy')
        self.assertIsInstance(latest, EnergyRelationReport)
        self.assertEqual(latest.verdict['max_residual'], 2e-8)

    def test_line_endings(self):
        path = self.archive.save(self._report(1e-8))
        with open(path, 'rb') as f:
            self.assertNotIn(b'\r\n', f.read())

    def test_without_latest_copy(self):
        archive = ReportArchive(os.path.join(self.temp_dir, 'plain'), keep_latest=False)
        archive.save(self._report(3e-8))
        self.assertFalse(os.path.exists(os.path.join(archive.archive_dir, 'energy_latest.json')))
        self.assertEqual(archive.load_latest('energy').verdict['max_residual'], 3e-8)

    def test_empty_archive(self):
        self.assertIsNone(self.archive.load_latest('curvature'))
        self.assertEqual(self.archive.history('curvature'), [])


if __name__ == '__main__':
    unittest.main()
