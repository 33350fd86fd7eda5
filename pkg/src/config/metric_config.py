"""
Metric configuration files.

A metric config describes one metric (or a field of them) for the CLI:

    {"dimension": 2, "basis": "monomial",
     "coefficients": {"l": "cos(x1*x2)+2", "m": "sqrt(2)*sin(x1*x2)", "n": "cos(x1*x2)+4"},
     "region": {"min": [-3, -3], "max": [3, 3]}, "grid": [61, 61]}

Curvature configs use "p" (an expression), "a"/"b" (second-root coefficients)
or a "branch" block {"kind", "k", "c1", "c2", "f"} instead of coefficients, and
may list sample "points".
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from errors import ConfigError, SymFinslerError
from polynomial.exprfield import ScalarField, as_field, parse
from polynomial.sympoly import (
    CharPolyCoeffs2D, CharPolyCoeffs3D, CoefficientSet2D, CoefficientSet3D,
    charpoly_to_monomial_2d, charpoly_to_monomial_3d,
)

logger = logging.getLogger(__name__)

COEFFICIENT_NAMES = {
    (2, 'monomial'): ('l', 'm', 'n'),
    (2, 'charpoly'): ('a', 'b', 'c'),
    (3, 'monomial'): ('l', 'm', 'n', 'q'),
    (3, 'charpoly'): ('a', 'b', 'c', 'd'),
}

CoefficientSet = Union[CoefficientSet2D, CoefficientSet3D]


def _transform_matrix(dimension: int) -> List[List[int]]:
    """Rows of the charpoly -> monomial map, read off by transforming unit vectors."""
    size = dimension + 1
    columns = []
    for j in range(size):
        unit = [1 if i == j else 0 for i in range(size)]
        if dimension == 2:
            columns.append(charpoly_to_monomial_2d(CharPolyCoeffs2D(*unit)).as_tuple())
        else:
            columns.append(charpoly_to_monomial_3d(CharPolyCoeffs3D(*unit)).as_tuple())
    return [[columns[j][i] for j in range(size)] for i in range(size)]


def _box(value: Any, key: str) -> Dict[str, List[float]]:
    if not isinstance(value, dict) or 'min' not in value or 'max' not in value:
        raise ConfigError(f"{key}: expected {{'min': [...], 'max': [...]}}, got {value!r}")
    try:
        lows = [float(v) for v in value['min']]
        highs = [float(v) for v in value['max']]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}: bounds must be numbers ({e})") from e
    if len(lows) != len(highs):
        raise ConfigError(f"{key}: min and max have different lengths")
    if any(lo > hi for lo, hi in zip(lows, highs)):
        raise ConfigError(f"{key}: min exceeds max")
    return {'min': lows, 'max': highs}


def _field(value: Any, key: str) -> ScalarField:
    try:
        return as_field(value)
    except SymFinslerError as e:
        raise ConfigError(f"{key}: {e}") from e
    except TypeError as e:
        raise ConfigError(f"{key}: expected a number or expression string, got {value!r}") from e


class MetricConfig:
    """A validated metric configuration."""

    def __init__(self, data: Dict[str, Any], source: Optional[str] = None):
        """
        Validate a parsed config mapping.

        Args:
            data: Parsed JSON/YAML mapping
            source: File the mapping came from, for messages

        Raises:
            ConfigError: invalid keys or values
        """
        if not isinstance(data, dict):
            raise ConfigError(f"Metric config must be a mapping, got {type(data).__name__}")
        self.raw = data
        self.source = source
        self.dimension = data.get('dimension', 2)
        if self.dimension not in (2, 3):
            raise ConfigError(f"dimension: must be 2 or 3, got {self.dimension!r}")
        self.basis = data.get('basis', 'monomial')
        if self.basis not in ('monomial', 'charpoly'):
            raise ConfigError(f"basis: must be 'monomial' or 'charpoly', got {self.basis!r}")

        self.coefficients: Dict[str, ScalarField] = {}
        if 'coefficients' in data:
            coefficients = data['coefficients']
            if not isinstance(coefficients, dict):
                raise ConfigError("coefficients: expected a mapping of name to number or expression")
            expected = COEFFICIENT_NAMES[(self.dimension, self.basis)]
            unknown = sorted(set(coefficients) - set(expected))
            missing = [name for name in expected if name not in coefficients]
            if unknown:
                raise ConfigError(f"coefficients.{unknown[0]}: not a {self.dimension}D {self.basis} coefficient "
                                  f"(expected {', '.join(expected)})")
            if missing:
                raise ConfigError(f"coefficients.{missing[0]}: missing")
            self.coefficients = {name: _field(coefficients[name], f"coefficients.{name}") for name in expected}

        self.region = _box(data['region'], 'region') if 'region' in data else None
        self.grid = self._grid(data.get('grid'))
        self.points = self._points(data.get('points'))
        self.branch = self._branch(data.get('branch'))
        self.p = _field(data['p'], 'p') if 'p' in data else None
        self.second_root = None
        if 'a' in data or 'b' in data:
            if 'a' not in data or 'b' not in data:
                raise ConfigError("a/b: second-root configs need both a and b")
            self.second_root = (_field(data['a'], 'a'), _field(data['b'], 'b'))
        self.k = self._number(data.get('k'), 'k')

    @staticmethod
    def _number(value: Any, key: str) -> Optional[float]:
        if value is None:
            return None
        if isinstance(value, bool):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        try:
            return float(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{key}: expected a number, got {value!r}") from e

    @staticmethod
    def _grid(value: Any) -> Optional[List[int]]:
        if value is None:
            return None
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"grid: expected a list of counts, got {value!r}")
        grid = []
        for v in value:
            integral = isinstance(v, int) or (isinstance(v, float) and v.is_integer())
            if isinstance(v, bool) or not integral:
                raise ConfigError(f"grid: counts must be integers, got {v!r}")
            grid.append(int(v))
        if any(v < 1 for v in grid):
            raise ConfigError(f"grid: counts must be positive, got {grid}")
        return grid

    @staticmethod
    def _points(value: Any) -> Optional[List[Tuple[float, ...]]]:
        if value is None:
            return None
        try:
            return [tuple(float(v) for v in point) for point in value]
        except (TypeError, ValueError) as e:
            raise ConfigError(f"points: expected a list of coordinate lists ({e})") from e

    @staticmethod
    def _branch(value: Any) -> Optional[Dict[str, Any]]:
        if value is None:
            return None
        if not isinstance(value, dict):
            raise ConfigError("branch: expected a mapping with kind, k, c1, c2, f")
        kind = value.get('kind', 'minus')
        if kind not in ('plus', 'minus', 'separable'):
            raise ConfigError(f"branch.kind: must be plus, minus or separable, got {kind!r}")
        try:
            branch = {'kind': kind, 'k': float(value.get('k', 0.0)), 'c1': float(value.get('c1', 1.0)),
                      'c2': float(value.get('c2', 0.0))}
        except (TypeError, ValueError) as e:
            raise ConfigError(f"branch: k, c1 and c2 must be numbers ({e})") from e
        if 'f' in value:
            branch['f'] = _field(value['f'], 'branch.f')
        return branch

    @property
    def coefficient_names(self) -> Tuple[str, ...]:
        return COEFFICIENT_NAMES[(self.dimension, self.basis)]

    @property
    def has_coefficients(self) -> bool:
        return bool(self.coefficients)

    def require_coefficients(self):
        if not self.coefficients:
            raise ConfigError("coefficients: required for this command")

    def monomial_fields(self) -> Tuple[ScalarField, ...]:
        """Monomial coefficient fields (l, m, n[, q]); charpoly configs are transformed."""
        self.require_coefficients()
        names = self.coefficient_names
        fields = [self.coefficients[name] for name in names]
        if self.basis == 'monomial':
            return tuple(fields)
        if all(f.is_constant for f in fields):
            values = [f(()) for f in fields]
            if self.dimension == 2:
                return tuple(as_field(v) for v in charpoly_to_monomial_2d(CharPolyCoeffs2D(*values)).as_tuple())
            return tuple(as_field(v) for v in charpoly_to_monomial_3d(CharPolyCoeffs3D(*values)).as_tuple())
        result = []
        for row in _transform_matrix(self.dimension):
            terms = [f"{weight}*({f.canonical()})" for weight, f in zip(row, fields) if weight]
            result.append(parse(' + '.join(terms)))
        return tuple(result)

    @property
    def is_constant(self) -> bool:
        return all(f.is_constant for f in self.coefficients.values())

    def coefficient_set(self, x: Optional[Sequence[float]] = None) -> CoefficientSet:
        """
        Monomial coefficients at a position (or of a constant config).

        Raises:
            ConfigError: the coefficients vary and no position was given
        """
        fields = self.monomial_fields()
        if x is None:
            if not all(f.is_constant for f in fields):
                raise ConfigError("coefficients: non-constant coefficients need a position")
            x = ()
        values = [float(f(x)) for f in fields]
        return CoefficientSet2D(*values) if self.dimension == 2 else CoefficientSet3D(*values)

    def to_dict(self) -> Dict[str, Any]:
        """The config as given (for echoing in reports)."""
        return json.loads(json.dumps(self.raw, default=str))

    def __str__(self) -> str:
        return self.source or f"{self.dimension}D {self.basis} metric config"


def load_metric_config(path: str) -> MetricConfig:
    """
    Load a metric config file (JSON, or YAML for .yaml/.yml).

    Raises:
        ConfigError: unreadable or invalid file
    """
    if not os.path.exists(path):
        raise ConfigError(f"Metric config not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            if path.endswith(('.yaml', '.yml')):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"Malformed metric config {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ConfigError(f"Metric config {path} is not UTF-8 text: {e}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read metric config {path}: {e}") from e
    logger.info(f"Loaded metric config from {path}")
    return MetricConfig(data, source=path)
