"""
Tests for the command runner and the command-line entry point.
"""

import copy
import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

import sys

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from cli.formatting import interval_text, samples_frame
from cli.runner import CheckRunner
from config.metric_config import MetricConfig
from config.settings import DEFAULT_SETTINGS
from errors import ConfigError
from finsler.pd2d import interval_table
from main import main, parse_values


class TestCheckRunner(unittest.TestCase):
    """Test cases for CheckRunner."""

    def setUp(self):
        self.runner = CheckRunner(copy.deepcopy(DEFAULT_SETTINGS))

    def test_check2d_counterexample(self):
        result = self.runner.check2d(MetricConfig({'coefficients': {'l': 4, 'm': 6, 'n': 5}}))
        self.assertEqual(result.exit_code, 1)
        witness = result.report.verdict['witness']
        self.assertEqual(witness['direction'], [1.0, -2.0])
        self.assertEqual(witness['minor'], 'det')
        self.assertAlmostEqual(witness['value'], -420.0, places=9)
        self.assertEqual(result.report.verdict['classification'], 'NotPositiveDefinite')

    def test_check2d_positive(self):
        result = self.runner.check2d(MetricConfig({'coefficients': {'l': 1, 'm': 2, 'n': 3}}))
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.report.verdict['classification'], 'PDRiemannianCritical')
        self.assertIsNone(result.report.verdict['witness'])
        self.assertEqual(result.report.details['det_hessian'], {'c40': 36.0, 'c31': 72.0, 'c22': 108.0})

    def test_check2d_field_uses_grid(self):
        config = MetricConfig({'coefficients': {'l': "cos(x1*x2)+2", 'm': "sqrt(2)*sin(x1*x2)", 'n': "cos(x1*x2)+4"},
                               'region': {'min': [-1, -1], 'max': [1, 1]}, 'grid': [5, 5]})
        result = self.runner.check2d(config)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(len(result.table), 25)
        with self.assertRaises(ConfigError):
            self.runner.check2d(MetricConfig({'coefficients': {'l': "x1", 'm': 0, 'n': 1}}))

    def test_check2d_rejects_3d(self):
        with self.assertRaises(ConfigError):
            self.runner.check2d(MetricConfig({'dimension': 3, 'coefficients': {'l': 1, 'm': 2, 'n': 3, 'q': 4}}))

    def test_check3d(self):
        result = self.runner.check3d(MetricConfig({'dimension': 3, 'coefficients': {'l': 1, 'm': 2, 'n': 3, 'q': 4}}),
                                     samples=300)
        self.assertEqual(result.exit_code, 0)
        self.assertFalse(result.report.verdict['certified'])
        self.assertEqual(result.report.details['checks'][0]['base_matrix_minors'], [12.0, 36.0, 96.0])

        failing = self.runner.check3d(MetricConfig({'dimension': 3, 'coefficients': {'l': 1, 'm': 2, 'n': 3, 'q': 7}}),
                                      samples=300)
        self.assertEqual(failing.exit_code, 1)

    def test_check3d_points(self):
        config = MetricConfig({'dimension': 3, 'coefficients': {'l': 1, 'm': "2*x1", 'n': "2 + x1^2", 'q': "2*x1^2 + 2*x1"},
                               'points': [[1, 0], [0.5, 0]]})
        result = self.runner.check3d(config, samples=300)
        self.assertEqual(len(result.report.details['checks']), 2)
        self.assertTrue(result.report.passed)

    def test_table(self):
        result = self.runner.table([1, 2, 3, 4], list(range(12)))
        self.assertEqual(result.report.verdict['cells'], 48)
        self.assertEqual(result.report.verdict['blank'], 12)
        self.assertEqual(list(result.table.columns), ['m', 'l', 'lower', 'upper', 'interval'])
        self.assertIn(']0.67,6[', result.text)

    def test_curvature_constant_k(self):
        config = MetricConfig({'branch': {'kind': 'minus', 'k': 1},
                               'region': {'min': [0.2, 0.2], 'max': [2, 2]}, 'grid': [10, 10]})
        result = self.runner.curvature(config)
        self.assertEqual(result.exit_code, 0)
        self.assertLessEqual(result.report.verdict['worst_residual'], 1e-6)
        self.assertEqual(result.report.verdict['points'], 100)
        self.assertFalse(result.table['K'].isna().any())

    def test_curvature_wrong_k_fails(self):
        config = MetricConfig({'branch': {'kind': 'minus', 'k': 1}, 'points': [[0.5, 0.5]]})
        self.assertEqual(self.runner.curvature(config, k=2.0).exit_code, 1)

    def test_curvature_data(self):
        config = MetricConfig({'p': "0.3*sin(x1)*cos(x2)", 'points': [[0.1, 0.2], [0.5, 0.5]]})
        result = self.runner.curvature(config)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(len(result.report.details['curvature']), 2)
        self.assertEqual(list(result.table.columns), ['x1', 'x2', 'p', 'K', 'residual', 'singular', 'error'])

    def test_curvature_second_root(self):
        config = MetricConfig({'a': "1", 'b': "-1", 'points': [[0.0, 0.0]], 'k': 0})
        self.assertEqual(self.runner.curvature(config).exit_code, 0)

    def test_curvature_negative_second_root(self):
        config = MetricConfig({'a': -1, 'b': 2, 'points': [[0.3, 0.4]]})
        result = self.runner.curvature(config, k=0.0)
        self.assertEqual(result.exit_code, 1)
        self.assertFalse(result.report.verdict['passed'])
        self.assertEqual(result.report.verdict['irregular'], 1)
        self.assertIn('must be positive', result.table.iloc[0]['error'])
        data = self.runner.curvature(config)
        self.assertEqual(data.exit_code, 1)
        self.assertEqual(data.report.verdict['irregular'], 1)

    def test_curvature_needs_field(self):
        with self.assertRaises(ConfigError):
            self.runner.curvature(MetricConfig({'points': [[0.0, 0.0]]}))

    def test_oracle_compare(self):
        result = self.runner.oracle_compare(random_samples=50, seed=7)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.report.verdict['samples'], 50)
        config = MetricConfig({'coefficients': {'l': 1, 'm': 2, 'n': "2 + x1"},
                               'region': {'min': [0, 0], 'max': [2, 0]}, 'grid': [3, 1]})
        self.assertEqual(self.runner.oracle_compare(config).report.verdict['compared'], 3)

    def test_energy(self):
        result = self.runner.energy(MetricConfig({'coefficients': {'l': 1, 'm': 2, 'n': 3}}), samples=20, seed=3)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.report.verdict['directions'], 20)
        self.assertEqual(result.report.verdict['skipped'], 0)

    def test_energy_all_skipped(self):
        config = MetricConfig({'coefficients': {'l': 1, 'm': 0, 'n': -3}, 'points': [[1, 1]]})
        result = self.runner.energy(config)
        self.assertEqual(result.exit_code, 1)
        self.assertEqual(result.report.verdict['skipped'], 1)

    def test_archive(self):
        temp_dir = tempfile.mkdtemp()
        try:
            settings = copy.deepcopy(DEFAULT_SETTINGS)
            settings['reports']['archive_dir'] = temp_dir
            CheckRunner(settings).table([1], [0])
            self.assertTrue(os.path.exists(os.path.join(temp_dir, 'table_latest.json')))
        finally:
            shutil.rmtree(temp_dir)


class TestFormatting(unittest.TestCase):
    """Test cases for text and table rendering."""

    def test_interval_text_layout(self):
        lines = interval_text(interval_table([1, 2], [0, 4])).splitlines()
        self.assertEqual(lines[0].split(), ['|m|', 'l=1', 'l=2'])
        self.assertEqual(lines[1].split(), ['0', ']0,6[', ']0,12['])
        self.assertEqual(lines[2].split(), ['4', ']4.39,12['])

    def test_samples_frame(self):
        frame = samples_frame([{'direction': [1.0, 0.0], 'residual': 0.0, 'passed': True, 'skipped': False}],
                              ['y1', 'y2', 'y3', 'residual', 'passed', 'skipped'])
        self.assertEqual(frame.iloc[0]['y1'], 1.0)
        self.assertTrue(frame['y3'].isna().all())


class TestMain(unittest.TestCase):
    """Test cases for the command-line entry point."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.settings = self._write('settings.yaml', "logging:\n  level: WARNING\n")

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _write(self, name, text):
        path = os.path.join(self.temp_dir, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def _config(self, data, name='metric.json'):
        return self._write(name, json.dumps(data))

    def _run(self, *argv):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout:
            code = main(list(argv) + ['--settings', self.settings])
        return code, stdout.getvalue()

    def test_parse_values(self):
        self.assertEqual(parse_values("1,2,3,4"), [1, 2, 3, 4])
        self.assertEqual(parse_values("0..3"), [0, 1, 2, 3])
        self.assertEqual(parse_values("0.5,2..3"), [0.5, 2, 3])

    def test_check2d_exit_codes(self):
        failing = self._config({'coefficients': {'l': 4, 'm': 6, 'n': 5}})
        code, output = self._run('check2d', failing)
        self.assertEqual(code, 1)
        self.assertIn('witness: det = -420', output)
        self.assertEqual(self._run('check2d', failing, '--json')[0], 1)

        passing = self._config({'coefficients': {'l': 1, 'm': 2, 'n': 3}}, 'pass.json')
        self.assertEqual(self._run('check2d', passing)[0], 0)

    def test_json_round_trip(self):
        path = self._config({'coefficients': {'l': "1", 'm': 2, 'n': 3.5}})
        code, output = self._run('check2d', path, '--json')
        first = json.loads(output)
        echoed = self._config(first['config'], 'echoed.json')
        _, second_output = self._run('check2d', echoed, '--json')
        second = json.loads(second_output)
        self.assertEqual(json.dumps(first['verdict']), json.dumps(second['verdict']))
        self.assertEqual(code, 0)

    def test_check3d_json_is_strict(self):
        path = self._config({'dimension': 3, 'coefficients': {'l': 0, 'm': 0, 'n': 1, 'q': 0}})
        code, output = self._run('check3d', path, '--json', '--samples', '100')
        self.assertEqual(code, 1)
        data = json.loads(output, parse_constant=lambda name: self.fail(f"non-strict constant {name}"))
        conditions = data['details']['checks'][0]['necessary_conditions']['conditions']
        self.assertIsNone(conditions[1]['left'])
        self.assertIsNone(conditions[1]['margin'])

    def test_table_and_csv(self):
        csv_path = os.path.join(self.temp_dir, 'table.csv')
        code, output = self._run('table', '--l', '1,2,3,4', '--m', '0..11', '--csv', csv_path)
        self.assertEqual(code, 0)
        self.assertIn(']0,6[', output)
        self.assertIn(']0.67,6[', output)
        with open(csv_path, 'rb') as f:
            content = f.read()
        self.assertNotIn(b'\r\n', content)
        lines = content.decode('utf-8').splitlines()
        self.assertEqual(lines[0], 'm,l,lower,upper,interval')
        self.assertEqual(len(lines), 49)

    def test_curvature(self):
        path = self._config({'branch': {'kind': 'minus', 'k': 1},
                             'region': {'min': [0.2, 0.2], 'max': [2, 2]}, 'grid': [10, 10]})
        self.assertEqual(self._run('curvature', path)[0], 0)
        self.assertEqual(self._run('curvature', path, '--constant-k', '1')[0], 0)
        self.assertEqual(self._run('curvature', path, '--constant-k', '3')[0], 1)

    def test_classify_field_yaml(self):
        path = self._write('field.yaml', "coefficients:\n  l: cos(x1*x2)+2\n  m: sqrt(2)*sin(x1*x2)\n"
                                         "  n: cos(x1*x2)+4\nregion:\n  min: [-3, -3]\n  max: [3, 3]\n"
                                         "grid: [7, 7]\n")
        csv_path = os.path.join(self.temp_dir, 'field.csv')
        code, _ = self._run('classify-field', path, '--csv', csv_path)
        self.assertEqual(code, 0)
        with open(csv_path, 'r', encoding='utf-8') as f:
            self.assertEqual(len(f.read().splitlines()), 50)

    def test_usage_errors(self):
        self.assertEqual(self._run('check2d')[0], 2)
        self.assertEqual(self._run('frobnicate')[0], 2)
        self.assertEqual(self._run('check2d', os.path.join(self.temp_dir, 'absent.json'))[0], 2)
        self.assertEqual(self._run('oracle-compare')[0], 2)
        bad = self._config({'coefficients': {'l': "x1 + * 2", 'm': 0, 'n': 1}})
        self.assertEqual(self._run('check2d', bad)[0], 2)
        steep = self._config({'branch': {'kind': 'minus'}, 'points': [[0.5, 0.5]], 'k': 'steep'}, 'steep.json')
        self.assertEqual(self._run('curvature', steep)[0], 2)
        fractional = self._config({'coefficients': {'l': "x1 + 2", 'm': 0, 'n': 3},
                                   'region': {'min': [0, 0], 'max': [1, 1]}, 'grid': [2.5, 3]}, 'frac.json')
        self.assertEqual(self._run('classify-field', fractional)[0], 2)
        latin = os.path.join(self.temp_dir, 'latin.json')
        with open(latin, 'wb') as f:
            f.write(b'{"coefficients": {"l": 1, "m": 2, "n": 3}, "note": "\xe9t\xe9"}')
        self.assertEqual(self._run('check2d', latin)[0], 2)

    def test_missing_settings_file(self):
        with mock.patch('sys.stdout', new_callable=io.StringIO):
            code = main(['table', '--settings', os.path.join(self.temp_dir, 'absent.yaml')])
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
