"""
Positive definiteness of symmetric fourth-root metrics on surfaces.

The metric is F = A^(1/4) with
    A = l(y1^4 + y2^4) + m(y1^3 y2 + y1 y2^3) + n y1^2 y2^2
and F is a Finsler metric exactly when the Hessian of A is positive definite
away from the origin. The decision reduces to the open interval
    (3/2) sqrt(4l^2 + 2m^2) - 3l < n < 6l
and, inside it, the definiteness polynomial is irreducible below the
Riemannian critical value (8l^2 + m^2)/(4l) and reducible above it.
"""

import logging
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from errors import InvalidInputError
from polynomial.sympoly import CoefficientSet2D, DensePolynomial, monomial_form_2d, orbit_polynomial

logger = logging.getLogger(__name__)

CRITICAL_SNAP = 1e-9
COARSE_DIRECTIONS = 360

# Small integer directions tried before the angular scan; (1,-2) comes before (2,-1).
_LATTICE_DIRECTIONS = [
    (1, 0), (0, 1), (1, 1), (1, -1),
    (1, 2), (1, -2), (2, 1), (2, -1),
    (1, 3), (1, -3), (3, 1), (3, -1),
    (2, 3), (2, -3), (3, 2), (3, -2),
]


class Verdict(str, Enum):
    NOT_POSITIVE_DEFINITE = 'NotPositiveDefinite'
    PD_IRREDUCIBLE = 'PDIrreducible'
    PD_REDUCIBLE = 'PDReducible'
    PD_RIEMANNIAN_CRITICAL = 'PDRiemannianCritical'

    @property
    def positive_definite(self) -> bool:
        return self is not Verdict.NOT_POSITIVE_DEFINITE


@dataclass(frozen=True)
class Quartic2Form:
    """Symmetric binary quartic c40(y1^4 + y2^4) + c31(y1^3 y2 + y1 y2^3) + c22 y1^2 y2^2."""

    c40: float
    c31: float
    c22: float

    def evaluate(self, y: Sequence[float]) -> float:
        y1, y2 = float(y[0]), float(y[1])
        return (self.c40 * (y1 ** 4 + y2 ** 4) + self.c31 * (y1 ** 3 * y2 + y1 * y2 ** 3)
                + self.c22 * y1 * y1 * y2 * y2)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.c40, self.c31, self.c22)

    def as_dense(self) -> DensePolynomial:
        return orbit_polynomial(2, {(4, 0): self.c40, (3, 1): self.c31, (2, 2): self.c22})

    def to_dict(self) -> Dict[str, float]:
        return {'c40': float(self.c40), 'c31': float(self.c31), 'c22': float(self.c22)}


@dataclass(frozen=True)
class DefinitenessPolynomial:
    """
    P(z) = alpha z^2 + beta z + gamma with z = y1/y2 + y2/y1.

    det A_ij = 3 y1^2 y2^2 P(z) off the axes, so det A_ij > 0 there iff P > 0 on |z| >= 2.
    """

    alpha: float
    beta: float
    gamma: float
    delta1: float
    delta2: float

    @property
    def discriminant(self) -> float:
        return self.beta * self.beta - 4.0 * self.alpha * self.gamma

    @property
    def is_irreducible(self) -> bool:
        """No real roots (negative discriminant)."""
        return self.discriminant < 0

    def evaluate(self, z: float) -> float:
        return self.alpha * z * z + self.beta * z + self.gamma

    def roots(self) -> List[complex]:
        return list(np.roots([self.alpha, self.beta, self.gamma]))

    def to_dict(self) -> Dict[str, float]:
        return {
            'alpha': float(self.alpha),
            'beta': float(self.beta),
            'gamma': float(self.gamma),
            'discriminant': float(self.discriminant),
            'delta1': float(self.delta1),
            'delta2': float(self.delta2),
        }


@dataclass(frozen=True)
class Condition:
    """One necessary condition with the two sides it compares; a side is None when undefined."""

    name: str
    holds: bool
    left: Optional[float]
    right: Optional[float]

    @property
    def margin(self) -> Optional[float]:
        """right - left; positive when a '<' condition holds with room."""
        if self.left is None or self.right is None:
            return None
        return self.right - self.left

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'holds': self.holds, 'left': self.left, 'right': self.right, 'margin': self.margin}


@dataclass
class NecessaryConditions:
    conditions: List[Condition] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.conditions)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.conditions if not c.holds]

    def __getitem__(self, name: str) -> Condition:
        for condition in self.conditions:
            if condition.name == name:
                return condition
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {'all_hold': self.all_hold, 'conditions': [c.to_dict() for c in self.conditions]}


@dataclass(frozen=True)
class Bounds2D:
    """Bounds on n for fixed (l, m); critical and star are None where undefined."""

    lower: float
    upper: float
    critical: Optional[float]
    star: Optional[float]

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {'lower': self.lower, 'upper': self.upper, 'critical': self.critical, 'star': self.star}


@dataclass(frozen=True)
class PDCheck:
    """Outcome of the interval criterion."""

    positive_definite: bool
    bounds: Bounds2D
    boundary_distance: float
    reason: str = ''

    def __bool__(self) -> bool:
        return self.positive_definite

    def to_dict(self) -> Dict[str, Any]:
        return {
            'positive_definite': self.positive_definite,
            'bounds': self.bounds.to_dict(),
            'boundary_distance': self.boundary_distance,
            'reason': self.reason,
        }


@dataclass(frozen=True)
class Witness:
    """A direction at which a leading minor of the Hessian is not positive."""

    direction: Tuple[float, float]
    minor: str
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {'direction': [float(v) for v in self.direction], 'minor': self.minor, 'value': float(self.value)}


@dataclass(frozen=True)
class Classification2D:
    verdict: Verdict
    bounds: Bounds2D
    witness: Optional[Witness] = None
    reason: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'verdict': self.verdict.value,
            'bounds': self.bounds.to_dict(),
            'witness': self.witness.to_dict() if self.witness else None,
            'reason': self.reason,
        }


@dataclass(frozen=True)
class IntervalCell:
    """One table cell: the n-interval for (l, m), blank when |m| >= 4l."""

    l: float
    m: float
    lower: Optional[float]
    upper: Optional[float]
    display: str

    @property
    def blank(self) -> bool:
        return self.lower is None

    def to_dict(self) -> Dict[str, Any]:
        return {'l': self.l, 'm': self.m, 'lower': self.lower, 'upper': self.upper, 'display': self.display}


def _floats(c: CoefficientSet2D) -> Tuple[float, float, float]:
    return c.as_floats()


def hessian2d(c: CoefficientSet2D, y: Sequence[float]) -> np.ndarray:
    """
    Hessian of A at a direction.

    Args:
        c: Monomial coefficients
        y: Direction (y1, y2) or a stack of shape (..., 2); the zero vector gives the zero matrix

    Returns:
        Symmetric matrix of shape (2, 2) or (..., 2, 2)
    """
    l, m, n = c.as_floats()
    y = np.asarray(y, dtype=float)
    y1, y2 = y[..., 0], y[..., 1]
    a11 = 12 * l * y1 * y1 + 6 * m * y1 * y2 + 2 * n * y2 * y2
    a12 = 3 * m * (y1 * y1 + y2 * y2) + 4 * n * y1 * y2
    a22 = 2 * n * y1 * y1 + 6 * m * y1 * y2 + 12 * l * y2 * y2
    return np.stack([np.stack([a11, a12], axis=-1), np.stack([a12, a22], axis=-1)], axis=-2)


def quartic_form(c: CoefficientSet2D) -> DensePolynomial:
    """A itself as a dense polynomial."""
    return monomial_form_2d(c)


def evaluate_metric(c: CoefficientSet2D, y: Sequence[float]) -> float:
    """A(y)."""
    l, m, n = c.as_tuple()
    y1, y2 = y[0], y[1]
    return l * (y1 ** 4 + y2 ** 4) + m * (y1 ** 3 * y2 + y1 * y2 ** 3) + n * y1 * y1 * y2 * y2


def det_hessian_coeffs(c: CoefficientSet2D) -> Quartic2Form:
    """
    Coefficients of det A_ij = A11 A22 - A12^2.

    Exact when the coefficients are ints or Fractions.
    """
    l, m, n = c.as_tuple()
    return Quartic2Form(
        24 * l * n - 9 * m * m,
        72 * l * m - 12 * m * n,
        144 * l * l + 18 * m * m - 12 * n * n,
    )


def definiteness_polynomial(c: CoefficientSet2D) -> DefinitenessPolynomial:
    """P(z) and the two factors of its discriminant, beta^2 - 4 alpha gamma = 16 delta1 delta2."""
    l, m, n = c.as_tuple()
    return DefinitenessPolynomial(
        alpha=8 * l * n - 3 * m * m,
        beta=24 * l * m - 4 * m * n,
        gamma=48 * l * l + 12 * m * m - 4 * n * n - 16 * l * n,
        delta1=9 * m * m - 12 * l * n - 2 * n * n,
        delta2=8 * l * l - 4 * l * n + m * m,
    )


def discriminant(c: CoefficientSet2D) -> float:
    return definiteness_polynomial(c).discriminant


def delta_ordering(c: CoefficientSet2D) -> bool:
    """Whether delta1 < delta2, i.e. 4m^2 < (2l + n)^2 (so 2|m| < 2l + n when 2l + n > 0)."""
    poly = definiteness_polynomial(c)
    return poly.delta1 < poly.delta2


def palindromic_quartic(c: CoefficientSet2D) -> Tuple[Tuple[float, ...], List[float]]:
    """
    det A(t, 1) as the palindromic quartic (c40, c31, c22, c31, c40) and its real roots.

    Real roots t give the directions (t, 1) on which det A_ij vanishes.
    """
    form = det_hessian_coeffs(c)
    coefficients = (form.c40, form.c31, form.c22, form.c31, form.c40)
    floats = [float(v) for v in coefficients]
    if not any(floats):
        return coefficients, []
    roots = np.roots(floats)
    real = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)))
    return coefficients, real


def necessary_conditions(c: CoefficientSet2D) -> NecessaryConditions:
    """
    The elementary necessary conditions for positive definiteness.

    Reports l > 0, 8ln > 3m^2, n < 6l, 2|m| < 2l + n and |m| < 4l.
    """
    l, m, n = _floats(c)
    checks = [
        ('l > 0', 0.0, l),
        ('8ln > 3m^2', 3 * m * m, 8 * l * n),
        ('n < 6l', n, 6 * l),
        ('2|m| < 2l + n', 2 * abs(m), 2 * l + n),
        ('|m| < 4l', abs(m), 4 * l),
    ]
    report = NecessaryConditions([Condition(name, left < right, left, right) for name, left, right in checks])
    logger.debug(f"Necessary conditions for {c}: failed {report.failed}")
    return report


def lower_bound(l: float, m: float) -> float:
    """(3/2) sqrt(4l^2 + 2m^2) - 3l."""
    return 1.5 * math.sqrt(4 * l * l + 2 * m * m) - 3 * l


def critical_value(l: float, m: float) -> float:
    """The Riemannian critical value (8l^2 + m^2)/(4l)."""
    if l <= 0:
        raise InvalidInputError(f"Critical value needs l > 0, got l = {l}")
    return (8 * l * l + m * m) / (4 * l)


def _star(l: float, m: float) -> float:
    if m >= 0:
        return 3 * m * (m + 2 * l) / (8 * l + m)
    return 3 * m * (m - 2 * l) / (8 * l - m)


def reducible_case_bounds(c: CoefficientSet2D) -> float:
    """
    The lower bound on n in the reducible case.

    Raises:
        InvalidInputError: unless l > 0 and |m| < 4l
    """
    l, m, _ = _floats(c)
    if l <= 0 or abs(m) >= 4 * l:
        raise InvalidInputError(f"Reducible case bound needs l > 0 and |m| < 4l, got l = {l}, m = {m}")
    return _star(l, m)


def _bounds(l: float, m: float) -> Bounds2D:
    critical = critical_value(l, m) if l > 0 else None
    star = _star(l, m) if l > 0 and abs(m) < 4 * l else None
    return Bounds2D(lower_bound(l, m), 6 * l, critical, star)


def bound_chain(l: float, m: float) -> Tuple[float, float, float, float, float]:
    """
    The ordered bounds 3m^2/(8l) <= lower <= star < critical < 6l.

    Raises:
        InvalidInputError: unless l > 0 and |m| < 4l
    """
    if l <= 0 or abs(m) >= 4 * l:
        raise InvalidInputError(f"Bound chain needs l > 0 and |m| < 4l, got l = {l}, m = {m}")
    return (3 * m * m / (8 * l), lower_bound(l, m), _star(l, m), critical_value(l, m), 6 * l)


def is_positive_definite(c: CoefficientSet2D) -> PDCheck:
    """
    The interval criterion (3/2) sqrt(4l^2 + 2m^2) - 3l < n < 6l.

    The inequalities are strict. boundary_distance is min(n - lower, upper - n),
    negative when the criterion fails.
    """
    l, m, n = _floats(c)
    bounds = _bounds(l, m)
    positive = bounds.lower < n < bounds.upper
    distance = min(n - bounds.lower, bounds.upper - n)
    if l <= 0:
        reason = 'l must be positive'
    elif n <= bounds.lower:
        reason = f"n = {n} is not above the lower bound {bounds.lower}"
    elif n >= bounds.upper:
        reason = f"n = {n} is not below 6l = {bounds.upper}"
    else:
        reason = ''
    logger.debug(f"Interval criterion for l={l}, m={m}, n={n}: {'PD' if positive else 'not PD'}")
    return PDCheck(positive, bounds, distance, reason)


def is_critical(c: CoefficientSet2D, snap: float = CRITICAL_SNAP) -> bool:
    l, m, n = _floats(c)
    if l <= 0:
        return False
    return abs(n - critical_value(l, m)) <= snap * (1 + abs(n))


def classify(c: CoefficientSet2D, snap: float = CRITICAL_SNAP, find_failure: bool = True) -> Classification2D:
    """
    Reducibility classification of a coefficient set.

    Args:
        c: Monomial coefficients
        snap: Relative tolerance for equality with the critical value
        find_failure: Search for a witness direction when not positive definite

    Returns:
        Classification2D
    """
    check = is_positive_definite(c)
    if not check.positive_definite:
        witness = find_witness(c) if find_failure else None
        return Classification2D(Verdict.NOT_POSITIVE_DEFINITE, check.bounds, witness, check.reason)
    _, _, n = _floats(c)
    critical = check.bounds.critical
    if is_critical(c, snap):
        verdict = Verdict.PD_RIEMANNIAN_CRITICAL
    elif n < critical:
        verdict = Verdict.PD_IRREDUCIBLE
    else:
        verdict = Verdict.PD_REDUCIBLE
    return Classification2D(verdict, check.bounds)


def riemannian_square(c: CoefficientSet2D, snap: float = CRITICAL_SNAP) -> Tuple[float, Tuple[float, float, float]]:
    """
    A = l (y1^2 + (m/2l) y1 y2 + y2^2)^2 at the critical value.

    Returns:
        (l, (1, m/(2l), 1)): scale and the coefficients of y1^2, y1 y2, y2^2

    Raises:
        InvalidInputError: n is not the critical value
    """
    l, m, n = _floats(c)
    if not is_critical(c, snap):
        raise InvalidInputError(f"{c} is not at the critical value, so A is not a perfect square")
    return l, (1.0, m / (2 * l), 1.0)


def generalized_berwald_coefficients(n: float) -> CoefficientSet2D:
    """
    Coefficients l = 1/4, m = sqrt(n - 1/2 + (2n - 3)^2/36) for a given n.

    Raises:
        InvalidInputError: the radicand is negative
    """
    radicand = n - 0.5 + (2 * n - 3) ** 2 / 36.0
    if radicand < 0:
        raise InvalidInputError(f"No real m for n = {n} (radicand {radicand})")
    return CoefficientSet2D(0.25, math.sqrt(radicand), n)


def n_interval(l: float, m: float) -> Tuple[float, float]:
    """
    Open interval of n values giving a positive definite metric for fixed (l, m).

    Raises:
        InvalidInputError: unless l > 0 and |m| < 4l
    """
    if l <= 0 or abs(m) >= 4 * l:
        raise InvalidInputError(f"n interval needs l > 0 and |m| < 4l, got l = {l}, m = {m}")
    return lower_bound(l, m), 6.0 * l


def reducible_fraction(ratio: float) -> float:
    """
    Share of the n interval lying above the critical value, for ratio = |m|/l.

    Raises:
        InvalidInputError: ratio outside [0, 4]
    """
    if not 0 <= ratio <= 4:
        raise InvalidInputError(f"Ratio |m|/l must be in [0, 4], got {ratio}")
    return 0.5 + math.sqrt(4 + 2 * ratio * ratio) / 12.0


def estimate_reducible_fraction(ratio: float, draws: int = 1_000_000, seed: int = 20240611) -> float:
    """Monte-Carlo estimate of reducible_fraction with n uniform in the interval (l = 1)."""
    if not 0 <= ratio < 4:
        raise InvalidInputError(f"Ratio |m|/l must be in [0, 4), got {ratio}")
    lower, upper = n_interval(1.0, ratio)
    rng = np.random.default_rng(seed)
    samples = rng.uniform(lower, upper, size=draws)
    return float(np.mean(samples > critical_value(1.0, ratio)))


def format_bound(value: float, decimals: int = 2) -> str:
    """Integral values print bare, everything else rounds half away from zero."""
    if abs(value - round(value)) < 1e-12:
        return str(int(round(value)))
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def interval_table(l_values: Iterable[float], m_values: Iterable[float], decimals: int = 2) -> List[IntervalCell]:
    """
    The n-intervals for every (l, |m|) combination, row-major over m.

    Cells with |m| >= 4l are blank.
    """
    l_values = list(l_values)
    cells = []
    for m in m_values:
        for l in l_values:
            if l <= 0 or abs(m) >= 4 * l:
                cells.append(IntervalCell(l, m, None, None, ''))
                continue
            lower, upper = n_interval(l, m)
            display = f"]{format_bound(lower, decimals)},{format_bound(upper, decimals)}["
            cells.append(IntervalCell(l, m, lower, upper, display))
    return cells


def _minors(c: CoefficientSet2D, theta: float) -> Tuple[float, float]:
    y = (math.cos(theta), math.sin(theta))
    h = hessian2d(c, y)
    return float(h[0, 0]), float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])


def find_witness(c: CoefficientSet2D, coarse: int = COARSE_DIRECTIONS) -> Optional[Witness]:
    """
    Search a direction where A11 <= 0 or det A_ij <= 0.

    Small integer directions are tried first so that the reported value is the
    exact minor there; otherwise a coarse angular scan is refined with a bounded
    scalar minimisation.

    Returns:
        Witness, or None when no failing direction is found
    """
    for y in _LATTICE_DIRECTIONS:
        h = hessian2d(c, y)
        a11 = float(h[0, 0])
        det = float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])
        if a11 <= 0:
            return Witness((float(y[0]), float(y[1])), 'A11', a11)
        if det <= 0:
            return Witness((float(y[0]), float(y[1])), 'det', det)

    # Both minors are even in y, so half a turn covers every direction.
    angles = np.linspace(0.0, math.pi, coarse, endpoint=False)
    values = np.array([_minors(c, t) for t in angles])
    step = math.pi / coarse
    for column, name in ((0, 'A11'), (1, 'det')):
        index = int(np.argmin(values[:, column]))
        theta0 = angles[index]
        result = minimize_scalar(lambda t: _minors(c, t)[column],
                                 bounds=(theta0 - step, theta0 + step), method='bounded')
        theta = float(result.x) if result.fun < values[index, column] else theta0
        value = _minors(c, theta)[column]
        if value <= 0:
            logger.debug(f"Witness for {c}: {name} = {value} at angle {theta}")
            return Witness((math.cos(theta), math.sin(theta)), name, value)
    return None
