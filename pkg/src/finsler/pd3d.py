"""
Symmetric fourth-root metrics in three dimensions.

A = l sum y_i^4 + m sum y_i^3 y_j + n sum y_i^2 y_j^2 + q sum y_i^2 y_j y_k.
Only necessary conditions are known here; positive definiteness beyond them is
reported as sampling evidence.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from errors import InvalidInputError
from finsler.pd2d import Condition, NecessaryConditions, Quartic2Form, is_positive_definite
from oracle.sampling import DirectionSampler
from polynomial.sympoly import CoefficientSet3D, DensePolynomial, Exponent, monomial_form_3d, orbit_polynomial

logger = logging.getLogger(__name__)

MIN_SAMPLES_3D = 100

SEXTIC_ORBITS = {
    'a': (6, 0, 0),
    'b': (5, 1, 0),
    'c': (4, 2, 0),
    'd': (4, 1, 1),
    'e': (3, 3, 0),
    'f': (3, 2, 1),
    'g': (2, 2, 2),
}


def hessian3d(c: CoefficientSet3D, y) -> np.ndarray:
    """
    Hessian of A at one direction or a stack of directions.

    Args:
        c: Monomial coefficients (l, m, n, q)
        y: Direction of shape (3,) or (..., 3)

    Returns:
        Array of shape (3, 3) or (..., 3, 3)
    """
    l, m, n, q = c.as_floats()
    y = np.asarray(y, dtype=float)
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    a11 = 12 * l * y1 ** 2 + m * (6 * y1 * y2 + 6 * y1 * y3) + n * (2 * y2 ** 2 + 2 * y3 ** 2) + 2 * q * y2 * y3
    a22 = 12 * l * y2 ** 2 + m * (6 * y1 * y2 + 6 * y2 * y3) + n * (2 * y1 ** 2 + 2 * y3 ** 2) + 2 * q * y1 * y3
    a33 = 12 * l * y3 ** 2 + m * (6 * y1 * y3 + 6 * y2 * y3) + n * (2 * y1 ** 2 + 2 * y2 ** 2) + 2 * q * y1 * y2
    a12 = m * (3 * y1 ** 2 + 3 * y2 ** 2) + 4 * n * y1 * y2 + q * (2 * y1 * y3 + 2 * y2 * y3 + y3 ** 2)
    a13 = m * (3 * y1 ** 2 + 3 * y3 ** 2) + 4 * n * y1 * y3 + q * (2 * y1 * y2 + y2 ** 2 + 2 * y2 * y3)
    a23 = m * (3 * y2 ** 2 + 3 * y3 ** 2) + 4 * n * y2 * y3 + q * (y1 ** 2 + 2 * y1 * y2 + 2 * y1 * y3)
    rows = [
        np.stack([a11, a12, a13], axis=-1),
        np.stack([a12, a22, a23], axis=-1),
        np.stack([a13, a23, a33], axis=-1),
    ]
    return np.stack(rows, axis=-2)


def quartic_form_3d(c: CoefficientSet3D) -> DensePolynomial:
    """A as a dense polynomial."""
    return monomial_form_3d(c)


@dataclass(frozen=True)
class Minor2Form3D:
    """A11 A22 - A12^2 as a quartic in (y1, y2, y3), keyed by exponent."""

    coefficients: Dict[Exponent, float]

    def coefficient(self, exponent: Sequence[int]) -> float:
        return self.coefficients.get(tuple(exponent), 0)

    def evaluate(self, y) -> float:
        return self.as_dense().evaluate(y)

    def as_dense(self) -> DensePolynomial:
        return DensePolynomial(3, 4, dict(self.coefficients))

    def to_dict(self) -> Dict[str, float]:
        return {''.join(str(e) for e in exponent): float(v) for exponent, v in sorted(self.coefficients.items(), reverse=True)}


@dataclass(frozen=True)
class Sextic3Form:
    """det A_ij as a symmetric sextic, one coefficient per monomial orbit."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float

    def as_dense(self) -> DensePolynomial:
        return orbit_polynomial(3, {pattern: getattr(self, name) for name, pattern in SEXTIC_ORBITS.items()})

    def evaluate(self, y) -> float:
        return self.as_dense().evaluate(y)

    def to_dict(self) -> Dict[str, float]:
        return {name: float(getattr(self, name)) for name in SEXTIC_ORBITS}


def minor2_coeffs(c: CoefficientSet3D) -> Minor2Form3D:
    """Coefficients of the leading 2x2 minor A11 A22 - A12^2."""
    l, m, n, q = c.as_tuple()
    pure = 24 * l * n - 9 * m * m
    cubic12 = 72 * l * m - 12 * m * n
    cubic13 = 24 * l * q + 12 * m * n - 12 * m * q
    mixed = 72 * l * m + 36 * m * m - 12 * n * q
    square3 = 24 * l * n + 6 * m * q + 4 * n * n - 4 * q * q
    cubic3 = 12 * m * n + 4 * n * q - 4 * q * q
    return Minor2Form3D({
        (4, 0, 0): pure,
        (0, 4, 0): pure,
        (3, 1, 0): cubic12,
        (1, 3, 0): cubic12,
        (3, 0, 1): cubic13,
        (0, 3, 1): cubic13,
        (2, 2, 0): 144 * l * l + 18 * m * m - 12 * n * n,
        (2, 1, 1): mixed,
        (1, 2, 1): mixed,
        (2, 0, 2): square3,
        (0, 2, 2): square3,
        (1, 1, 2): 36 * m * m + 24 * m * n - 8 * n * q - 4 * q * q,
        (1, 0, 3): cubic3,
        (0, 1, 3): cubic3,
        (0, 0, 4): 4 * n * n - q * q,
    })


def restrict_minor_to_plane(form: Minor2Form3D) -> Quartic2Form:
    """The y3 = 0 restriction, which is the 2D det A_ij of (l, m, n)."""
    return Quartic2Form(form.coefficient((4, 0, 0)), form.coefficient((3, 1, 0)), form.coefficient((2, 2, 0)))


def det_coeffs(c: CoefficientSet3D) -> Sextic3Form:
    """Orbit coefficients a..g of det A_ij; exact for int or Fraction input."""
    l, m, n, q = c.as_tuple()
    a = 48 * l * n ** 2 - 12 * l * q ** 2 - 36 * m ** 2 * n + 18 * m ** 2 * q
    b = (144 * l * m * n + 48 * l * n * q - 48 * l * q ** 2 - 54 * m ** 3 + 18 * m ** 2 * q
         - 24 * m * n ** 2 + 6 * m * q ** 2)
    c_ = (288 * l ** 2 * n - 108 * l * m ** 2 + 72 * l * m * q + 48 * l * n ** 2 - 48 * l * q ** 2
          + 54 * m ** 3 + 18 * m ** 2 * n - 54 * m ** 2 * q + 12 * m * n * q + 6 * m * q ** 2
          - 24 * n ** 3 + 6 * n * q ** 2)
    d = (432 * l * m ** 2 + 288 * l * m * n - 96 * l * n * q - 48 * l * q ** 2 - 108 * m ** 3
         - 72 * m ** 2 * n + 96 * m * n * q - 24 * m * q ** 2 - 24 * n ** 2 * q + 6 * q ** 3)
    e = (288 * l ** 2 * q + 288 * l * m * n - 288 * l * m * q + 72 * m ** 2 * n + 36 * m ** 2 * q
         - 48 * m * n ** 2 - 24 * m * q ** 2 - 24 * n ** 2 * q + 24 * n * q ** 2)
    f = (864 * l ** 2 * m + 432 * l * m ** 2 - 144 * l * m * n - 144 * l * n * q + 108 * m ** 3
         + 72 * m ** 2 * n - 36 * m ** 2 * q + 48 * m * n ** 2 - 96 * m * n * q - 24 * m * q ** 2
         + 24 * n ** 2 * q + 12 * q ** 3)
    g = (1728 * l ** 3 + 648 * l * m ** 2 - 432 * l * n ** 2 + 540 * m ** 3 - 162 * m ** 2 * q
         - 216 * m * n * q + 144 * n ** 3 + 18 * q ** 3)
    return Sextic3Form(a, b, c_, d, e, f, g)


def base_matrix(c: CoefficientSet3D) -> np.ndarray:
    """Matrix B with A11 = y^T B y; also the Hessian at (1, 0, 0)."""
    l, m, n, q = c.as_floats()
    return np.array([[12 * l, 3 * m, 3 * m], [3 * m, 2 * n, q], [3 * m, q, 2 * n]])


def base_matrix_minors(c: CoefficientSet3D) -> Tuple[Any, Any, Any]:
    """Leading principal minors of the base matrix: 12l, 24ln - 9m^2, 48ln^2 - 12lq^2 - 36m^2 n + 18m^2 q."""
    l, m, n, q = c.as_tuple()
    return (
        12 * l,
        24 * l * n - 9 * m * m,
        48 * l * n * n - 12 * l * q * q - 36 * m * m * n + 18 * m * m * q,
    )


@dataclass
class NecessaryConditions3D:
    conditions: NecessaryConditions
    planar_positive_definite: bool
    q_bounds: Optional[Tuple[float, float]]

    @property
    def all_hold(self) -> bool:
        return self.conditions.all_hold and self.planar_positive_definite

    def to_dict(self) -> Dict[str, Any]:
        return {
            'all_hold': self.all_hold,
            'conditions': [c.to_dict() for c in self.conditions.conditions],
            'planar_positive_definite': self.planar_positive_definite,
            'q_bounds': list(self.q_bounds) if self.q_bounds else None,
        }


def necessary_conditions_3d(c: CoefficientSet3D) -> NecessaryConditions3D:
    """
    Necessary conditions for a positive definite Hessian in 3D.

    l > 0, (3m^2 - 4ln)/(2l) < q < 2n (positivity of A11) and the 2D criterion
    on (l, m, n), which must hold on the y3 = 0 plane.
    """
    l, m, n, q = c.as_floats()
    conditions = [Condition('l > 0', l > 0, 0.0, l)]
    q_bounds = None
    if l > 0:
        q_lower = (3 * m * m - 4 * l * n) / (2 * l)
        q_bounds = (q_lower, 2 * n)
        conditions.append(Condition('(3m^2 - 4ln)/(2l) < q', q_lower < q, q_lower, q))
    else:
        # the lower bound is undefined for l <= 0
        conditions.append(Condition('(3m^2 - 4ln)/(2l) < q', False, None, q))
    conditions.append(Condition('q < 2n', q < 2 * n, q, 2 * n))
    planar = is_positive_definite(c.planar())
    report = NecessaryConditions3D(NecessaryConditions(conditions), planar.positive_definite, q_bounds)
    logger.debug(f"3D necessary conditions for {c}: {'hold' if report.all_hold else 'fail'}")
    return report


@dataclass
class MinorRecord:
    name: str
    value: float
    direction: Tuple[float, float, float]

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'value': self.value, 'direction': list(self.direction)}


@dataclass
class NumericEvidence3D:
    """Leading minors sampled over the sphere; evidence, not a proof."""

    positive_evidence: bool
    directions: int
    minima: Dict[str, MinorRecord] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'positive_evidence': self.positive_evidence,
            'directions': self.directions,
            'certified': False,
            'minima': {name: record.to_dict() for name, record in self.minima.items()},
        }


def leading_minors(hessians: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Delta1, Delta2, Delta3 for a stack of 3x3 matrices."""
    delta1 = hessians[..., 0, 0]
    delta2 = hessians[..., 0, 0] * hessians[..., 1, 1] - hessians[..., 0, 1] * hessians[..., 1, 0]
    delta3 = np.linalg.det(hessians)
    return delta1, delta2, delta3


def numeric_pd_check_3d(c: CoefficientSet3D, samples: int = 2000,
                        sampler: Optional[DirectionSampler] = None) -> NumericEvidence3D:
    """
    Evaluate the three leading minors of the Hessian over sphere directions.

    Args:
        c: Coefficients
        samples: Fibonacci lattice size (at least 100); ignored when sampler is given
        sampler: Direction sampler to use instead

    Returns:
        NumericEvidence3D with the smallest value of each minor and where it occurs
    """
    if sampler is None:
        if samples < MIN_SAMPLES_3D:
            raise InvalidInputError(f"Need at least {MIN_SAMPLES_3D} sphere samples, got {samples}")
        sampler = DirectionSampler(3, samples)
    directions = sampler.directions()
    minors = leading_minors(hessian3d(c, directions))
    minima = {}
    positive = True
    for name, values in zip(('delta1', 'delta2', 'delta3'), minors):
        index = int(np.argmin(values))
        minima[name] = MinorRecord(name, float(values[index]), tuple(float(v) for v in directions[index]))
        positive = positive and bool(values[index] > 0)
    logger.info(f"Numeric 3D check for {c} over {len(directions)} directions: "
                f"{'positive evidence' if positive else 'non-positive minor found'}")
    return NumericEvidence3D(positive, len(directions), minima)
