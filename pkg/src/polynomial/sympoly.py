"""
Symmetric polynomial plumbing for locally symmetric polynomial metrics.

A locally symmetric m-th root metric has F^m = P(s_1, ..., s_n), a polynomial
in the elementary symmetric polynomials of the fiber coordinates. This module
holds the dense monomial representation, the coefficient records of the
characteristic and monomial bases, and the linear transforms between them.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from errors import InvalidInputError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Number = Union[int, float, Fraction]

MAX_SYMMETRIZE_DIMENSION = 6


@dataclass(frozen=True)
class DensePolynomial:
    """
    Homogeneous polynomial stored as a sorted map from exponent tuples to coefficients.

    Attributes:
        dimension: Number of variables y_1, ..., y_n
        degree: Total degree m (positive and even)
        coefficients: Map from exponent multi-index to coefficient
    """

    dimension: int
    degree: int
    coefficients: Mapping[Exponent, Number] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError(f"Polynomial dimension must be positive, got {self.dimension}")
        if self.degree < 1 or self.degree % 2:
            raise InvalidInputError(f"Polynomial degree must be a positive even integer, got {self.degree}")
        normalized = {}
        for exponent, value in self.coefficients.items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != self.dimension or any(e < 0 for e in exponent):
                raise InvalidInputError(f"Exponent {exponent} does not fit dimension {self.dimension}")
            if sum(exponent) != self.degree:
                raise InvalidInputError(f"Exponent {exponent} does not sum to degree {self.degree}")
            if value != 0:
                normalized[exponent] = normalized.get(exponent, 0) + value
        object.__setattr__(self, 'coefficients', dict(sorted(normalized.items(), reverse=True)))

    def coefficient(self, exponent: Sequence[int]) -> Number:
        """Coefficient of the monomial with the given exponent (0 when absent)."""
        return self.coefficients.get(tuple(exponent), 0)

    def evaluate(self, y: Sequence[float]) -> float:
        """
        Evaluate the polynomial at a direction.

        Args:
            y: Direction with one entry per variable

        Returns:
            Polynomial value
        """
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dimension:
            raise InvalidInputError(f"Expected a direction of length {self.dimension}, got {y.shape[-1]}")
        total = np.zeros(y.shape[:-1])
        for exponent, value in self.coefficients.items():
            total = total + float(value) * np.prod(y ** np.array(exponent), axis=-1)
        return total if total.ndim else float(total)

    def partial(self, index: int) -> Dict[Exponent, Number]:
        """Exact partial derivative by y_index as a raw coefficient map."""
        return _partial_terms(self.coefficients, index)

    def gradient(self, y: Sequence[float]) -> np.ndarray:
        """Exact gradient of the polynomial at y."""
        y = np.asarray(y, dtype=float)
        return np.array([_evaluate_terms(self.partial(i), y) for i in range(self.dimension)])

    def hessian(self, y: Sequence[float]) -> np.ndarray:
        """Exact Hessian matrix of the polynomial at y."""
        y = np.asarray(y, dtype=float)
        result = np.zeros((self.dimension, self.dimension))
        for i in range(self.dimension):
            first = self.partial(i)
            for j in range(i, self.dimension):
                second = _partial_terms(first, j)
                result[i, j] = result[j, i] = _evaluate_terms(second, y)
        return result

    def permuted(self, sigma: Sequence[int]) -> 'DensePolynomial':
        """
        Compose with a coordinate permutation: returns q(y) = p(y_sigma(1), ..., y_sigma(n)).

        Args:
            sigma: Permutation of range(dimension)
        """
        terms: Dict[Exponent, Number] = {}
        for exponent, value in self.coefficients.items():
            moved = [0] * self.dimension
            for i, e in enumerate(exponent):
                moved[sigma[i]] = e
            terms[tuple(moved)] = terms.get(tuple(moved), 0) + value
        return DensePolynomial(self.dimension, self.degree, terms)

    def is_close(self, other: 'DensePolynomial', rel_tol: float = 1e-12, abs_tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison with another polynomial."""
        if (self.dimension, self.degree) != (other.dimension, other.degree):
            return False
        keys = set(self.coefficients) | set(other.coefficients)
        return all(
            math.isclose(float(self.coefficient(k)), float(other.coefficient(k)), rel_tol=rel_tol, abs_tol=abs_tol)
            for k in keys
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dimension': self.dimension,
            'degree': self.degree,
            'coefficients': {','.join(map(str, k)): float(v) for k, v in self.coefficients.items()},
        }


def _partial_terms(terms: Mapping[Exponent, Number], index: int) -> Dict[Exponent, Number]:
    result: Dict[Exponent, Number] = {}
    for exponent, value in terms.items():
        if exponent[index] == 0:
            continue
        lowered = list(exponent)
        lowered[index] -= 1
        key = tuple(lowered)
        result[key] = result.get(key, 0) + value * exponent[index]
    return result


def _evaluate_terms(terms: Mapping[Exponent, Number], y: np.ndarray) -> float:
    return float(sum(float(v) * np.prod(y ** np.array(e)) for e, v in terms.items()))


@dataclass(frozen=True)
class CharPolyCoeffs2D:
    """Coefficients of a s_1^4 + b s_1^2 s_2 + c s_2^2."""

    a: Number
    b: Number
    c: Number

    dimension: ClassVar[int] = 2

    def terms(self) -> Dict[Exponent, Number]:
        return {(4, 0): self.a, (2, 1): self.b, (0, 2): self.c}


@dataclass(frozen=True)
class CharPolyCoeffs3D:
    """Coefficients of a s_1^4 + b s_1^2 s_2 + c s_2^2 + d s_1 s_3."""

    a: Number
    b: Number
    c: Number
    d: Number

    dimension: ClassVar[int] = 3

    def terms(self) -> Dict[Exponent, Number]:
        return {(4, 0, 0): self.a, (2, 1, 0): self.b, (0, 2, 0): self.c, (1, 0, 1): self.d}


@dataclass(frozen=True)
class CharPolyCoeffs4D:
    """Five-coefficient characteristic polynomial of a fourth root metric in 4D."""

    c4000: Number
    c2100: Number
    c0200: Number
    c1010: Number
    c0001: Number

    dimension: ClassVar[int] = 4

    def terms(self) -> Dict[Exponent, Number]:
        return {
            (4, 0, 0, 0): self.c4000,
            (2, 1, 0, 0): self.c2100,
            (0, 2, 0, 0): self.c0200,
            (1, 0, 1, 0): self.c1010,
            (0, 0, 0, 1): self.c0001,
        }


@dataclass(frozen=True)
class SecondRootCharPoly:
    """Second root characteristic polynomial a s_1^2 + b s_2 in any dimension n >= 2."""

    a: Number
    b: Number
    n: int = 2

    @property
    def dimension(self) -> int:
        return self.n

    def terms(self) -> Dict[Exponent, Number]:
        first = (2,) + (0,) * (self.n - 1)
        second = (0, 1) + (0,) * (self.n - 2)
        return {first: self.a, second: self.b}


@dataclass(frozen=True)
class CoefficientSet2D:
    """Monomial coefficients of A = l(y1^4 + y2^4) + m(y1^3 y2 + y1 y2^3) + n y1^2 y2^2."""

    l: Number
    m: Number
    n: Number

    def as_tuple(self) -> Tuple[Number, Number, Number]:
        return (self.l, self.m, self.n)

    def as_floats(self) -> Tuple[float, float, float]:
        return (float(self.l), float(self.m), float(self.n))

    def scaled(self, t: float) -> 'CoefficientSet2D':
        return CoefficientSet2D(self.l * t, self.m * t, self.n * t)

    def to_dict(self) -> Dict[str, float]:
        return {'l': float(self.l), 'm': float(self.m), 'n': float(self.n)}


@dataclass(frozen=True)
class CoefficientSet3D:
    """Monomial coefficients (l, m, n, q) of the symmetric quartic in three variables."""

    l: Number
    m: Number
    n: Number
    q: Number

    def as_tuple(self) -> Tuple[Number, Number, Number, Number]:
        return (self.l, self.m, self.n, self.q)

    def as_floats(self) -> Tuple[float, float, float, float]:
        return (float(self.l), float(self.m), float(self.n), float(self.q))

    def planar(self) -> CoefficientSet2D:
        """The (l, m, n) part, i.e. the metric restricted to the y_3 = 0 plane."""
        return CoefficientSet2D(self.l, self.m, self.n)

    def scaled(self, t: float) -> 'CoefficientSet3D':
        return CoefficientSet3D(self.l * t, self.m * t, self.n * t, self.q * t)

    def to_dict(self) -> Dict[str, float]:
        return {'l': float(self.l), 'm': float(self.m), 'n': float(self.n), 'q': float(self.q)}


CharPolyCoeffs = Union[CharPolyCoeffs2D, CharPolyCoeffs3D, CharPolyCoeffs4D, SecondRootCharPoly]


def elementary_symmetric(y: Sequence[Number]) -> Tuple[Number, ...]:
    """
    Compute the elementary symmetric polynomials s_1, ..., s_n of y.

    Args:
        y: Tuple of n >= 1 entries; ints and Fractions stay exact

    Returns:
        Tuple (s_1, ..., s_n)
    """
    values = list(y)
    if not values:
        raise InvalidInputError("elementary_symmetric needs at least one entry")
    partial: List[Number] = [1] + [0] * len(values)
    for i, value in enumerate(values):
        for k in range(i + 1, 0, -1):
            partial[k] = partial[k] + value * partial[k - 1]
    return tuple(partial[1:])


def symmetrize(p: DensePolynomial) -> DensePolynomial:
    """
    Average a polynomial over all coordinate permutations.

    Args:
        p: Homogeneous polynomial in at most six variables

    Returns:
        (1/n!) * sum over sigma of p composed with sigma
    """
    if p.dimension > MAX_SYMMETRIZE_DIMENSION:
        raise InvalidInputError(
            f"symmetrize enumerates permutations and supports at most "
            f"{MAX_SYMMETRIZE_DIMENSION} variables, got {p.dimension}"
        )
    count = math.factorial(p.dimension)
    exact = all(isinstance(v, (int, Fraction)) for v in p.coefficients.values())
    terms: Dict[Exponent, Number] = {}
    for sigma in itertools.permutations(range(p.dimension)):
        for exponent, value in p.permuted(sigma).coefficients.items():
            terms[exponent] = terms.get(exponent, 0) + value
    scale = Fraction(1, count) if exact else 1.0 / count
    return DensePolynomial(p.dimension, p.degree, {k: v * scale for k, v in terms.items()})


def is_symmetric(p: DensePolynomial, tol: float = 1e-12) -> bool:
    """True when p is invariant under every coordinate permutation."""
    return all(p.permuted(sigma).is_close(p, rel_tol=tol, abs_tol=tol)
               for sigma in itertools.permutations(range(p.dimension)))


def _exact(value: Number) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def charpoly_to_monomial_2d(c: CharPolyCoeffs2D, exact: bool = False) -> CoefficientSet2D:
    """
    Map characteristic coefficients (a, b, c) to monomial coefficients (l, m, n).

    Args:
        c: Characteristic polynomial coefficients
        exact: Compute in rational arithmetic

    Returns:
        l = a, m = 4a + b, n = 6a + 2b + c
    """
    a, b, cc = (c.a, c.b, c.c)
    if exact:
        a, b, cc = _exact(a), _exact(b), _exact(cc)
    return CoefficientSet2D(a, 4 * a + b, 6 * a + 2 * b + cc)


def monomial_to_charpoly_2d(c: CoefficientSet2D, exact: bool = False) -> CharPolyCoeffs2D:
    """Inverse of charpoly_to_monomial_2d (back substitution in the unit lower-triangular system)."""
    l, m, n = c.as_tuple()
    if exact:
        l, m, n = _exact(l), _exact(m), _exact(n)
    a = l
    b = m - 4 * a
    return CharPolyCoeffs2D(a, b, n - 6 * a - 2 * b)


def charpoly_to_monomial_3d(c: CharPolyCoeffs3D, exact: bool = False) -> CoefficientSet3D:
    """
    Map (a, b, c, d) to (l, m, n, q).

    l = a, m = 4a + b, n = 6a + 2b + c, q = 12a + 5b + 2c + d.
    """
    a, b, cc, d = (c.a, c.b, c.c, c.d)
    if exact:
        a, b, cc, d = (_exact(v) for v in (a, b, cc, d))
    return CoefficientSet3D(a, 4 * a + b, 6 * a + 2 * b + cc, 12 * a + 5 * b + 2 * cc + d)


def monomial_to_charpoly_3d(c: CoefficientSet3D, exact: bool = False) -> CharPolyCoeffs3D:
    """Inverse of charpoly_to_monomial_3d."""
    l, m, n, q = c.as_tuple()
    if exact:
        l, m, n, q = (_exact(v) for v in (l, m, n, q))
    a = l
    b = m - 4 * a
    cc = n - 6 * a - 2 * b
    return CharPolyCoeffs3D(a, b, cc, q - 12 * a - 5 * b - 2 * cc)


def _elementary_terms(k: int, n: int) -> Dict[Exponent, int]:
    """s_k in n variables as a coefficient map."""
    terms = {}
    for subset in itertools.combinations(range(n), k):
        exponent = [0] * n
        for i in subset:
            exponent[i] = 1
        terms[tuple(exponent)] = 1
    return terms


def _multiply(p: Mapping[Exponent, Number], q: Mapping[Exponent, Number]) -> Dict[Exponent, Number]:
    result: Dict[Exponent, Number] = {}
    for e1, v1 in p.items():
        for e2, v2 in q.items():
            key = tuple(a + b for a, b in zip(e1, e2))
            result[key] = result.get(key, 0) + v1 * v2
    return result


def expand_charpoly(c: CharPolyCoeffs, n: Optional[int] = None) -> DensePolynomial:
    """
    Expand a characteristic polynomial into dense monomial form.

    Args:
        c: Characteristic coefficients (2D, 3D, 4D fourth root or second root)
        n: Dimension; must match the coefficient record when given

    Returns:
        DensePolynomial of A = P(s_1, ..., s_n)
    """
    dimension = c.dimension
    if n is not None and n != dimension:
        raise InvalidInputError(f"Unsupported dimension {n} for {type(c).__name__} (expects {dimension})")
    if dimension < 2:
        raise InvalidInputError(f"Unsupported dimension {dimension}")

    elementary = [_elementary_terms(k, dimension) for k in range(1, dimension + 1)]
    total: Dict[Exponent, Number] = {}
    degree = None
    for powers, coefficient in c.terms().items():
        degree = sum((k + 1) * j for k, j in enumerate(powers))
        product: Dict[Exponent, Number] = {(0,) * dimension: coefficient}
        for k, power in enumerate(powers):
            for _ in range(power):
                product = _multiply(product, elementary[k])
        for exponent, value in product.items():
            total[exponent] = total.get(exponent, 0) + value
    logger.debug(f"Expanded {type(c).__name__} into {len(total)} monomials")
    return DensePolynomial(dimension, degree, total)


def orbit_polynomial(dimension: int, orbits: Mapping[Sequence[int], Number]) -> DensePolynomial:
    """
    Build a symmetric polynomial from coefficients of monomial orbit classes.

    Args:
        dimension: Number of variables
        orbits: Map from a partition (e.g. (3, 1)) to the coefficient shared by
            every distinct permutation of that exponent pattern

    Returns:
        DensePolynomial summing all orbit monomials
    """
    terms: Dict[Exponent, Number] = {}
    degree = None
    for partition, value in orbits.items():
        pattern = tuple(partition) + (0,) * (dimension - len(partition))
        degree = sum(pattern)
        for exponent in set(itertools.permutations(pattern)):
            terms[exponent] = terms.get(exponent, 0) + value
    return DensePolynomial(dimension, degree, terms)


def monomial_form_2d(c: CoefficientSet2D) -> DensePolynomial:
    """Dense A = l(y1^4+y2^4) + m(y1^3 y2 + y1 y2^3) + n y1^2 y2^2."""
    return orbit_polynomial(2, {(4, 0): c.l, (3, 1): c.m, (2, 2): c.n})


def monomial_form_3d(c: CoefficientSet3D) -> DensePolynomial:
    """Dense A for the 3D symmetric quartic with orbit coefficients l, m, n, q."""
    return orbit_polynomial(3, {(4, 0, 0): c.l, (3, 1, 0): c.m, (2, 2, 0): c.n, (2, 1, 1): c.q})


def characteristic_polynomial_coefficients(values: Iterable[float]) -> np.ndarray:
    """Coefficients of prod (t - y_i), highest power first (numpy convention)."""
    return np.poly(np.asarray(list(values), dtype=float))
