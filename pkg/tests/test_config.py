"""
Tests for settings and metric configuration files.
"""

import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

import sys

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from config.metric_config import MetricConfig, load_metric_config
from config.settings import DEFAULT_SETTINGS, _deep_update, load_settings, logging_level
from errors import ConfigError
from polynomial.sympoly import CoefficientSet2D, CoefficientSet3D


class TestSettings(unittest.TestCase):
    """Test cases for load_settings."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _write(self, name, text):
        path = os.path.join(self.temp_dir, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_defaults_without_files(self):
        with mock.patch('config.settings.default_settings_paths', return_value=[]):
            settings = load_settings()
        self.assertEqual(settings, DEFAULT_SETTINGS)
        self.assertIsNot(settings['oracle'], DEFAULT_SETTINGS['oracle'])

    def test_explicit_file_merges(self):
        path = self._write('settings.yaml', "oracle:\n  seed: 7\nlogging:\n  level: DEBUG\n")
        settings = load_settings(path)
        self.assertEqual(settings['oracle']['seed'], 7)
        self.assertEqual(settings['oracle']['directions_2d'], 720)
        self.assertEqual(logging_level(settings), 10)

    def test_first_default_path_wins(self):
        first = self._write('first.yaml', "table:\n  decimals: 3\n")
        second = self._write('second.yaml', "table:\n  decimals: 4\n")
        with mock.patch('config.settings.default_settings_paths', return_value=[first, second]):
            self.assertEqual(load_settings()['table']['decimals'], 3)

    def test_missing_explicit_file(self):
        with self.assertRaises(ConfigError):
            load_settings(os.path.join(self.temp_dir, 'absent.yaml'))

    def test_malformed_explicit_file(self):
        path = self._write('bad.yaml', "oracle: [unclosed\n")
        with self.assertRaises(ConfigError):
            load_settings(path)

    def test_malformed_default_file_is_skipped(self):
        bad = self._write('bad.yaml', "oracle: [unclosed\n")
        with mock.patch('config.settings.default_settings_paths', return_value=[bad]):
            self.assertEqual(load_settings(), DEFAULT_SETTINGS)

    def test_non_mapping(self):
        path = self._write('list.yaml', "- 1\n- 2\n")
        with self.assertRaises(ConfigError):
            load_settings(path)

    def test_deep_update(self):
        target = {'a': {'b': 1, 'c': 2}, 'd': 3}
        _deep_update(target, {'a': {'b': 5}, 'e': 6})
        self.assertEqual(target, {'a': {'b': 5, 'c': 2}, 'd': 3, 'e': 6})

    def test_unknown_level(self):
        self.assertEqual(logging_level({'logging': {'level': 'LOUD'}}), 20)


class TestMetricConfig(unittest.TestCase):
    """Test cases for MetricConfig."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_constant_monomial(self):
        config = MetricConfig({'coefficients': {'l': 1, 'm': 2, 'n': 3}})
        self.assertTrue(config.is_constant)
        self.assertEqual(config.coefficient_set(), CoefficientSet2D(1.0, 2.0, 3.0))

    def test_charpoly_constant(self):
        config = MetricConfig({'basis': 'charpoly', 'coefficients': {'a': 1, 'b': 1, 'c': 1}})
        self.assertEqual(config.coefficient_set(), CoefficientSet2D(1.0, 5.0, 9.0))

    def test_charpoly_3d(self):
        config = MetricConfig({'dimension': 3, 'basis': 'charpoly', 'coefficients': {'a': 1, 'b': 0, 'c': 0, 'd': 0}})
        self.assertEqual(config.coefficient_set(), CoefficientSet3D(1.0, 4.0, 6.0, 12.0))

    def test_charpoly_expression_fields(self):
        config = MetricConfig({'basis': 'charpoly', 'coefficients': {'a': "x1", 'b': 0, 'c': "1 + x2"}})
        self.assertFalse(config.is_constant)
        # l = a, m = 4a + b, n = 6a + 2b + c
        self.assertEqual(config.coefficient_set((2.0, 3.0)), CoefficientSet2D(2.0, 8.0, 16.0))
        with self.assertRaises(ConfigError):
            config.coefficient_set()

    def test_field_config(self):
        config = MetricConfig({
            'coefficients': {'l': "cos(x1*x2)+2", 'm': "sqrt(2)*sin(x1*x2)", 'n': "cos(x1*x2)+4"},
            'region': {'min': [-3, -3], 'max': [3, 3]},
            'grid': [61, 61],
        })
        self.assertEqual(config.region, {'min': [-3.0, -3.0], 'max': [3.0, 3.0]})
        self.assertEqual(config.grid, [61, 61])
        self.assertEqual(MetricConfig({'grid': [4.0, 6]}).grid, [4, 6])
        self.assertEqual(config.coefficient_set((0.0, 0.0)), CoefficientSet2D(3.0, 0.0, 5.0))

    def test_curvature_config(self):
        config = MetricConfig({'branch': {'kind': 'plus', 'k': 2}, 'points': [[0.1, 0.2]], 'k': 2})
        self.assertEqual(config.branch, {'kind': 'plus', 'k': 2.0, 'c1': 1.0, 'c2': 0.0})
        self.assertEqual(config.points, [(0.1, 0.2)])
        self.assertEqual(config.k, 2.0)
        self.assertFalse(config.has_coefficients)
        with self.assertRaises(ConfigError):
            config.require_coefficients()

    def test_second_root_config(self):
        config = MetricConfig({'a': "1", 'b': "-1"})
        a, b = config.second_root
        self.assertEqual(a(()), 1.0)
        with self.assertRaises(ConfigError):
            MetricConfig({'a': "1"})

    def test_invalid_values(self):
        cases = [
            {'dimension': 4},
            {'basis': 'power'},
            {'coefficients': {'l': 1, 'm': 2}},
            {'coefficients': {'l': 1, 'm': 2, 'n': 3, 'q': 4}},
            {'coefficients': {'l': "x1 +", 'm': 2, 'n': 3}},
            {'coefficients': {'l': "foo(x1)", 'm': 2, 'n': 3}},
            {'region': {'min': [1, 1], 'max': [0, 0]}},
            {'region': [0, 1]},
            {'grid': [0, 5]},
            {'grid': [2.5, 3]},
            {'grid': ["10", 3]},
            {'grid': 5},
            {'k': 'steep'},
            {'k': [1]},
            {'points': [['a', 1]]},
            {'branch': {'kind': 'sideways'}},
            [1, 2, 3],
        ]
        for data in cases:
            with self.assertRaises(ConfigError, msg=str(data)):
                MetricConfig(data)

    def test_error_names_the_key(self):
        with self.assertRaises(ConfigError) as ctx:
            MetricConfig({'coefficients': {'l': 1, 'm': "x1 + * 2", 'n': 3}})
        self.assertIn('coefficients.m', str(ctx.exception))

    def test_load_json_and_yaml(self):
        json_path = os.path.join(self.temp_dir, 'metric.json')
        with open(json_path, 'w', encoding='utf-8') as f:
            json.dump({'coefficients': {'l': 4, 'm': 6, 'n': 5}}, f)
        yaml_path = os.path.join(self.temp_dir, 'metric.yaml')
        with open(yaml_path, 'w', encoding='utf-8') as f:
            f.write("dimension: 3\ncoefficients:\n  l: 1\n  m: 2\n  n: 3\n  q: 4\n")

        config = load_metric_config(json_path)
        self.assertEqual(config.coefficient_set(), CoefficientSet2D(4.0, 6.0, 5.0))
        self.assertEqual(str(config), json_path)
        self.assertEqual(config.to_dict(), {'coefficients': {'l': 4, 'm': 6, 'n': 5}})
        self.assertEqual(load_metric_config(yaml_path).coefficient_set(), CoefficientSet3D(1.0, 2.0, 3.0, 4.0))

    def test_load_errors(self):
        with self.assertRaises(ConfigError):
            load_metric_config(os.path.join(self.temp_dir, 'absent.json'))
        bad = os.path.join(self.temp_dir, 'bad.json')
        with open(bad, 'w', encoding='utf-8') as f:
            f.write("{not json")
        with self.assertRaises(ConfigError):
            load_metric_config(bad)
        latin = os.path.join(self.temp_dir, 'latin.json')
        with open(latin, 'wb') as f:
            f.write(b'{"coefficients": {"l": 1, "m": 2, "n": 3}, "note": "\xe9t\xe9"}')
        with self.assertRaises(ConfigError):
            load_metric_config(latin)


if __name__ == '__main__':
    unittest.main()
