"""
Brute-force checks used to validate the symbolic criteria.

Everything here works from the Hessian of A evaluated at sampled directions or
from finite differences, never from the closed-form bounds.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from errors import DomainError, InvalidInputError
from finsler.pd2d import hessian2d, is_positive_definite, n_interval
from finsler.pd3d import hessian3d
from oracle.sampling import DirectionSampler
from polynomial.sympoly import (
    CoefficientSet2D, CoefficientSet3D, DensePolynomial, monomial_form_2d, monomial_form_3d,
)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240611
DEFAULT_MARGIN = 1e-6
DEFAULT_FD_STEP = 1e-4
REFINED_CANDIDATES = 3

Form = Union[CoefficientSet2D, CoefficientSet3D, DensePolynomial]


@dataclass(frozen=True)
class EigenvalueEvidence:
    """Smallest Hessian eigenvalue found over the sampled directions."""

    min_eigenvalue: float
    direction: Tuple[float, ...]
    directions: int

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue > 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'min_eigenvalue': self.min_eigenvalue,
            'direction': list(self.direction),
            'directions': self.directions,
            'positive': self.positive,
        }


def _dimension(form: Form) -> int:
    if isinstance(form, CoefficientSet2D):
        return 2
    if isinstance(form, CoefficientSet3D):
        return 3
    return form.dimension


def _hessians(form: Form, directions: np.ndarray) -> np.ndarray:
    if isinstance(form, CoefficientSet2D):
        return hessian2d(form, directions)
    if isinstance(form, CoefficientSet3D):
        return hessian3d(form, directions)
    return np.array([form.hessian(y) for y in directions])


def _min_eigenvalues(form: Form, directions: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(_hessians(form, directions))[..., 0]


def _refine_angle(form: Form, theta0: float, width: float) -> Tuple[float, float]:
    def objective(theta: float) -> float:
        y = np.array([[math.cos(theta), math.sin(theta)]])
        return float(_min_eigenvalues(form, y)[0])

    result = minimize_scalar(objective, bounds=(theta0 - width, theta0 + width), method='bounded')
    return float(result.x), float(result.fun)


def min_eigenvalue_on_sphere(form: Form, sampler: Optional[DirectionSampler] = None,
                             refine: bool = True) -> EigenvalueEvidence:
    """
    Minimal eigenvalue of the Hessian of A over unit directions.

    Args:
        form: Coefficients (2D or 3D) or any homogeneous DensePolynomial
        sampler: Directions to use; defaults to 720 (2D) or 2000 (3D)
        refine: In 2D, polish the smallest sampled values with a bounded scalar search

    Returns:
        EigenvalueEvidence; positive means positive definite on every sample
    """
    dimension = _dimension(form)
    if sampler is None:
        sampler = DirectionSampler.for_dimension(dimension)
    if sampler.dimension != dimension:
        raise InvalidInputError(f"Sampler dimension {sampler.dimension} does not match form dimension {dimension}")
    directions = sampler.directions()
    values = _min_eigenvalues(form, directions)
    index = int(np.argmin(values))
    best_value = float(values[index])
    best_direction = tuple(float(v) for v in directions[index])

    if refine and dimension == 2:
        width = 2.0 * math.pi / sampler.count
        for candidate in np.argsort(values)[:REFINED_CANDIDATES]:
            theta0 = math.atan2(directions[candidate][1], directions[candidate][0])
            theta, value = _refine_angle(form, theta0, width)
            if value < best_value:
                best_value = value
                best_direction = (math.cos(theta), math.sin(theta))
    logger.debug(f"Minimal Hessian eigenvalue {best_value:.6g} at {best_direction}")
    return EigenvalueEvidence(best_value, best_direction, len(directions))


def finite_diff_hessian(f: Callable[[np.ndarray], float], y: Sequence[float], h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """
    Central second differences of a scalar function.

    Args:
        f: Function of a direction
        y: Nonzero point
        h: Step

    Returns:
        Symmetric matrix; mixed entries average the (i, j) and (j, i) stencils
    """
    if h <= 0:
        raise InvalidInputError(f"Finite difference step must be positive, got {h}")
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise InvalidInputError("Finite difference Hessian needs a nonzero point")
    size = len(y)
    basis = np.eye(size) * h
    center = f(y)
    result = np.zeros((size, size))
    for i in range(size):
        result[i, i] = (f(y + basis[i]) - 2.0 * center + f(y - basis[i])) / (h * h)
        for j in range(size):
            if i == j:
                continue
            result[i, j] = (f(y + basis[i] + basis[j]) - f(y + basis[i] - basis[j])
                            - f(y - basis[i] + basis[j]) + f(y - basis[i] - basis[j])) / (4.0 * h * h)
    return 0.5 * (result + result.T)


def _central_gradient(f: Callable[[np.ndarray], float], y: np.ndarray, h: float) -> np.ndarray:
    basis = np.eye(len(y)) * h
    return np.array([(f(y + e) - f(y - e)) / (2.0 * h) for e in basis])


def _dense(form: Form) -> DensePolynomial:
    if isinstance(form, CoefficientSet2D):
        return monomial_form_2d(form)
    if isinstance(form, CoefficientSet3D):
        return monomial_form_3d(form)
    return form


@dataclass(frozen=True)
class EnergyResidual:
    direction: Tuple[float, ...]
    residual: float
    tol: float
    degree: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {'direction': list(self.direction), 'residual': self.residual, 'tol': self.tol,
                'degree': self.degree, 'passed': self.passed}


def energy_relation_check(form: Form, y: Sequence[float], tol: float = 1e-5,
                          h: float = DEFAULT_FD_STEP) -> EnergyResidual:
    """
    Compare the Hessian of A with the one rebuilt from the energy E = A^(2/m)/2.

    With m = 2k the relation is A_ij / 2^k = k(k-1) E^(k-2) E_i E_j + k E^(k-1) E_ij;
    for quartics this is A_ij = 8 E_i E_j + 8 E E_ij. E's derivatives are finite
    differences, A_ij is exact.

    Args:
        form: Coefficients or a homogeneous DensePolynomial of even degree m
        y: Direction with A(y) > 0
        tol: Allowed relative residual
        h: Second difference step, scaled by max(1, |y|)

    Returns:
        EnergyResidual with the max relative residual over all entries

    Raises:
        DomainError: A(y) <= 0
    """
    polynomial = _dense(form)
    y = np.asarray(y, dtype=float)
    value = polynomial.evaluate(y)
    if not value > 0:
        raise DomainError(f"A({tuple(y)}) = {value} is not positive, so E is not smooth there")
    degree = polynomial.degree
    k = degree // 2
    exponent = 2.0 / degree

    def energy(point: np.ndarray) -> float:
        return 0.5 * polynomial.evaluate(point) ** exponent

    scale = max(1.0, float(np.linalg.norm(y)))
    e = energy(y)
    gradient = _central_gradient(energy, y, 1e-5 * scale)
    second = finite_diff_hessian(energy, y, h * scale)
    rebuilt = (2.0 ** k) * (k * (k - 1) * e ** (k - 2) * np.outer(gradient, gradient) + k * e ** (k - 1) * second)
    exact = polynomial.hessian(y)
    residual = float(np.max(np.abs(exact - rebuilt)) / max(float(np.max(np.abs(exact))), 1e-300))
    logger.debug(f"Energy relation at {tuple(y)}: relative residual {residual:.3e}")
    return EnergyResidual(tuple(float(v) for v in y), residual, tol, degree)


def random_coefficients(count: int, box: Tuple[float, float] = (-10.0, 10.0), seed: int = DEFAULT_SEED,
                        dimension: int = 2) -> List[Union[CoefficientSet2D, CoefficientSet3D]]:
    """Uniform coefficient sets in a box; reproducible from the seed."""
    rng = np.random.default_rng(seed)
    size = 3 if dimension == 2 else 4
    rows = rng.uniform(box[0], box[1], size=(count, size))
    cls = CoefficientSet2D if dimension == 2 else CoefficientSet3D
    return [cls(*(float(v) for v in row)) for row in rows]


def random_pd_coefficients(count: int, seed: int = DEFAULT_SEED) -> List[CoefficientSet2D]:
    """Coefficient sets strictly inside the positive definite region."""
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(count):
        l = rng.uniform(0.5, 5.0)
        m = rng.uniform(-3.6, 3.6) * l
        lower, upper = n_interval(l, m)
        n = rng.uniform(lower + 0.05 * (upper - lower), upper - 0.05 * (upper - lower))
        corpus.append(CoefficientSet2D(float(l), float(m), float(n)))
    return corpus


def boundary_margin(c: CoefficientSet2D, margin: float) -> float:
    """The skip distance margin * (1 + |l| + |m| + |n|)."""
    l, m, n = c.as_floats()
    return margin * (1.0 + abs(l) + abs(m) + abs(n))


@dataclass
class AgreementSummary:
    """Confusion counts of the interval criterion against the eigenvalue oracle."""

    samples: int
    seed: Optional[int]
    margin: float
    directions: int
    skipped: int = 0
    counts: Dict[str, int] = field(default_factory=lambda: {
        'both_pd': 0, 'both_not_pd': 0, 'criterion_only': 0, 'oracle_only': 0})
    counterexamples: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def agreements(self) -> int:
        return self.counts['both_pd'] + self.counts['both_not_pd']

    @property
    def disagreements(self) -> int:
        return self.counts['criterion_only'] + self.counts['oracle_only']

    @property
    def compared(self) -> int:
        return self.agreements + self.disagreements

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.disagreements == 0,
            'samples': self.samples,
            'seed': self.seed,
            'margin': self.margin,
            'directions': self.directions,
            'compared': self.compared,
            'skipped': self.skipped,
            'agreements': self.agreements,
            'disagreements': self.disagreements,
            'counts': dict(self.counts),
        }


def agreement_harness(samples: int = 10_000, box: Tuple[float, float] = (-10.0, 10.0),
                      margin: float = DEFAULT_MARGIN, seed: int = DEFAULT_SEED,
                      sampler: Optional[DirectionSampler] = None,
                      corpus: Optional[Sequence[CoefficientSet2D]] = None) -> AgreementSummary:
    """
    Compare is_positive_definite with min_eigenvalue_on_sphere.

    Args:
        samples: Number of random coefficient sets (ignored when corpus is given)
        box: Sampling interval for each coefficient
        margin: Relative boundary distance below which a sample is skipped
        seed: Random seed, recorded in the summary
        sampler: Oracle directions (default 720)
        corpus: Explicit coefficient sets to compare instead of random ones

    Returns:
        AgreementSummary with counterexample coefficients
    """
    if margin <= 0:
        raise InvalidInputError(f"Boundary margin must be positive, got {margin}")
    sampler = sampler or DirectionSampler.for_dimension(2)
    if corpus is None:
        corpus = random_coefficients(samples, box, seed)
    else:
        seed = None
    summary = AgreementSummary(len(corpus), seed, margin, len(sampler))
    for c in corpus:
        check = is_positive_definite(c)
        if abs(check.boundary_distance) <= boundary_margin(c, margin):
            summary.skipped += 1
            continue
        oracle = min_eigenvalue_on_sphere(c, sampler)
        if check.positive_definite and oracle.positive:
            summary.counts['both_pd'] += 1
        elif not check.positive_definite and not oracle.positive:
            summary.counts['both_not_pd'] += 1
        else:
            key = 'criterion_only' if check.positive_definite else 'oracle_only'
            summary.counts[key] += 1
            summary.counterexamples.append({'coefficients': c.to_dict(), 'criterion': check.positive_definite,
                                            'oracle': oracle.to_dict()})
            logger.warning(f"Criterion and oracle disagree for {c}: criterion {check.positive_definite}, "
                           f"oracle min eigenvalue {oracle.min_eigenvalue}")
    logger.info(f"Agreement harness: {summary.agreements} agreements, {summary.disagreements} disagreements, "
                f"{summary.skipped} skipped")
    return summary
