"""
Locally symmetric second-root (Riemannian) metrics and their surface curvature.

A second-root metric with characteristic polynomial a(x) s1^2 + b(x) s2 has the
Hessian 2a(x) * g where g is the unit-diagonal matrix with constant off-diagonal
entry p = 1 + b/(2a). On surfaces the curvature of g is a function of p and its
first and second partials only.

Index conventions (arrays are zero-based):
    christoffel[k, i, j]   = Gamma^k_ij
    riemann_up[l, i, j, k] = R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
                             + Gamma^l_ir Gamma^r_jk - Gamma^l_jr Gamma^r_ik
    riemann_down[i, j, k, l] = g_lm R^m_ijk
    ricci[j, k]            = g^il R_ijkl
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg

from errors import InvalidInputError, RegularityError, SingularMetricError
from polynomial.exprfield import ScalarField, as_field, evaluate, parse, partial
from riemann.partials import surface_partials

logger = logging.getLogger(__name__)

DEFAULT_SINGULAR_EPS = 1e-8
SINGULAR_SAMPLE_MARGIN = 1e-6

EXACT = 'exact'
FINITE_DIFFERENCE = 'finite-difference'
MODES = (EXACT, FINITE_DIFFERENCE)

BRANCHES = ('plus', 'minus', 'separable')

FieldLike = Union[ScalarField, str, float, int]


@dataclass(frozen=True)
class SymmetricSecondRoot:
    """
    Second-root metric with local characteristic polynomial a(x) s1^2 + b(x) s2.

    Attributes:
        a: Coefficient field of s1^2
        b: Coefficient field of s2
        n: Dimension of the tangent spaces
    """

    a: ScalarField
    b: ScalarField
    n: int = 2

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError(f"Second-root metrics need n >= 2, got {self.n}")
        object.__setattr__(self, 'a', as_field(self.a))
        object.__setattr__(self, 'b', as_field(self.b))

    def p_field_text(self) -> str:
        """Expression text of p = 1 + b/(2a)."""
        return f"1 + ({self.b.canonical()})/(2*({self.a.canonical()}))"

    def p_field(self) -> ScalarField:
        return parse(self.p_field_text())


@dataclass(frozen=True)
class SecondRootSpectrum:
    """Positive definiteness verdict and closed-form spectrum of the model matrix."""

    p: float
    n: int
    positive_definite: bool
    lambda1: float
    lambda2: float

    @property
    def lambda1_multiplicity(self) -> int:
        return self.n - 1

    @property
    def eigenvalues(self) -> List[float]:
        """All n eigenvalues in ascending order."""
        return sorted([self.lambda1] * (self.n - 1) + [self.lambda2])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'n': self.n,
            'positive_definite': self.positive_definite,
            'lambda1': self.lambda1,
            'lambda1_multiplicity': self.lambda1_multiplicity,
            'lambda2': self.lambda2,
        }


@dataclass
class CurvatureData:
    """
    Curvature quantities of the unit-diagonal surface metric at one position.

    Attributes:
        position: (x1, x2)
        p: Value of the off-diagonal field
        christoffel: Gamma^k_ij, shape (2, 2, 2)
        riemann_up: R^l_ijk, shape (2, 2, 2, 2)
        riemann_down: R_ijkl, shape (2, 2, 2, 2)
        ricci: Ric_ij, shape (2, 2)
        scalar: Scalar curvature S
        gauss: Gaussian curvature K
    """

    position: Tuple[float, float]
    p: float
    christoffel: np.ndarray
    riemann_up: np.ndarray
    riemann_down: np.ndarray
    ricci: np.ndarray
    scalar: float
    gauss: float
    mode: str = EXACT

    def to_dict(self) -> Dict[str, Any]:
        return {
            'position': [float(v) for v in self.position],
            'p': float(self.p),
            'mode': self.mode,
            'christoffel': self.christoffel.tolist(),
            'riemann_up': self.riemann_up.tolist(),
            'riemann_down': self.riemann_down.tolist(),
            'ricci': self.ricci.tolist(),
            'scalar': float(self.scalar),
            'gauss': float(self.gauss),
        }


@dataclass
class CurvatureSample:
    """Gaussian curvature and its residual at one sample point."""

    position: Tuple[float, float]
    p: Optional[float]
    gauss: Optional[float]
    residual: Optional[float]
    singular: bool = False
    error: Optional[str] = None
    irregular: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'position': [float(v) for v in self.position],
            'p': self.p,
            'gauss': self.gauss,
            'residual': self.residual,
            'singular': self.singular,
            'irregular': self.irregular,
            'error': self.error,
        }


@dataclass
class ConstantCurvatureCheck:
    """Result of checking K = k over a list of sample points."""

    expression: str
    k: float
    tol: float
    mode: str
    samples: List[CurvatureSample] = field(default_factory=list)

    @property
    def evaluated(self) -> List[CurvatureSample]:
        return [s for s in self.samples if s.residual is not None]

    @property
    def flagged(self) -> List[CurvatureSample]:
        return [s for s in self.samples if s.residual is None]

    @property
    def irregular(self) -> List[CurvatureSample]:
        """Points where the second-root coefficient a(x) is not positive."""
        return [s for s in self.samples if s.irregular]

    @property
    def worst_residual(self) -> Optional[float]:
        residuals = [s.residual for s in self.evaluated]
        return max(residuals) if residuals else None

    @property
    def worst_position(self) -> Optional[Tuple[float, float]]:
        evaluated = self.evaluated
        if not evaluated:
            return None
        return max(evaluated, key=lambda s: s.residual).position

    @property
    def passed(self) -> bool:
        worst = self.worst_residual
        return worst is not None and worst <= self.tol and not self.irregular

    def to_dict(self) -> Dict[str, Any]:
        worst_position = self.worst_position
        return {
            'field': self.expression,
            'k': self.k,
            'tol': self.tol,
            'mode': self.mode,
            'passed': self.passed,
            'worst_residual': self.worst_residual,
            'worst_position': list(worst_position) if worst_position else None,
            'evaluated': len(self.evaluated),
            'flagged': len(self.flagged),
            'irregular': len(self.irregular),
            'samples': [s.to_dict() for s in self.samples],
        }


def p_parameter(metric: SymmetricSecondRoot, x) -> float:
    """
    The parameter p = 1 + b(x)/(2a(x)).

    Raises:
        RegularityError: a(x) is not positive
    """
    a = evaluate(metric.a, x)
    if not a > 0:
        raise RegularityError(f"Coefficient a must be positive, got a({tuple(x)}) = {a}")
    b = evaluate(metric.b, x)
    return 1.0 + b / (2.0 * a)


def regularity_error(metric: Optional[SymmetricSecondRoot], x: Sequence[float]) -> Optional[str]:
    """
    Message describing why the second-root metric is not regular at x, or None.

    A missing metric (p given directly) is always regular.
    """
    if metric is None:
        return None
    try:
        p_parameter(metric, x)
    except RegularityError as e:
        logger.warning(f"Irregular sample point {tuple(x)}: {e}")
        return str(e)
    except ArithmeticError as e:
        logger.warning(f"Could not evaluate the second-root coefficients at {tuple(x)}: {e}")
        return str(e)
    return None


def _check_dimension(n: int):
    if n < 2:
        raise InvalidInputError(f"Dimension must be at least 2, got {n}")


def is_pd_second_root(p: float, n: int) -> SecondRootSpectrum:
    """
    Positive definiteness of the unit-diagonal model matrix.

    The matrix is positive definite iff -1/(n-1) < p < 1; its eigenvalues are
    1 - p with multiplicity n - 1 and 1 + (n-1)p.

    Args:
        p: Off-diagonal value
        n: Dimension

    Returns:
        SecondRootSpectrum; truthiness is in `positive_definite`
    """
    _check_dimension(n)
    positive = -1.0 / (n - 1) < p < 1.0
    return SecondRootSpectrum(float(p), n, positive, 1.0 - p, 1.0 + (n - 1) * p)


def model_matrix(p: float, n: int) -> np.ndarray:
    """The n x n matrix with unit diagonal and every off-diagonal entry p."""
    _check_dimension(n)
    return (1.0 - p) * np.eye(n) + p * np.ones((n, n))


def inverse_metric(p: float, n: int) -> np.ndarray:
    """
    Closed-form inverse of the model matrix.

    Raises:
        RegularityError: p outside ]-1/(n-1), 1[
    """
    spectrum = is_pd_second_root(p, n)
    if not spectrum.positive_definite:
        raise RegularityError(f"p = {p} is outside the positive definite range for n = {n}")
    scale = 1.0 / ((1.0 - p) * (1.0 + (n - 1) * p))
    b = np.full((n, n), -p)
    np.fill_diagonal(b, 1.0 + (n - 2) * p)
    return scale * b


def eigen_certificate(p: float, n: int) -> Dict[str, Any]:
    """
    Compare the closed-form spectrum with a numeric eigensolver.

    Returns:
        Dict with the numeric eigenvalues, the closed-form ones and their max difference
    """
    spectrum = is_pd_second_root(p, n)
    numeric = linalg.eigvalsh(model_matrix(p, n))
    closed = np.array(spectrum.eigenvalues)
    error = float(np.max(np.abs(np.sort(numeric) - closed)))
    logger.debug(f"Eigen certificate p={p}, n={n}: max deviation {error:.3e}")
    return {
        'numeric': [float(v) for v in np.sort(numeric)],
        'closed_form': [float(v) for v in closed],
        'max_error': error,
        'positive_definite': spectrum.positive_definite,
    }


def second_root_hessian(a: float, b: float, n: int) -> np.ndarray:
    """Hessian of a s1^2 + b s2: 2a on the diagonal, 2a + b elsewhere."""
    _check_dimension(n)
    return 2.0 * a * np.eye(n) + (2.0 * a + b) * (np.ones((n, n)) - np.eye(n))


def is_pd_second_root_metric(a: float, b: float, n: int) -> bool:
    """Whether a s1^2 + b s2 has a positive definite Hessian (a > 0 and p in range)."""
    if not a > 0:
        return False
    return is_pd_second_root(1.0 + b / (2.0 * a), n).positive_definite


def _derivatives(p: ScalarField, x: Sequence[float], mode: str) -> Tuple[float, np.ndarray, np.ndarray]:
    if mode == EXACT:
        return surface_partials(p, x)
    if mode == FINITE_DIFFERENCE:
        value = evaluate(p, x)
        gradient = np.array([partial(p, 1, x), partial(p, 2, x)])
        mixed = partial(p, (1, 2), x)
        hessian = np.array([
            [partial(p, (1, 1), x), mixed],
            [mixed, partial(p, (2, 2), x)],
        ])
        return value, gradient, hessian
    raise InvalidInputError(f"Unknown derivative mode {mode!r}; expected one of {MODES}")


def _guard(value: float, x: Sequence[float], eps: float):
    if not np.isfinite(value) or abs(value) >= 1.0 - eps:
        raise SingularMetricError(f"|p| = {abs(value)} is within {eps} of 1 at {tuple(x)}")


def _christoffel_from_values(p: float, dp: np.ndarray) -> np.ndarray:
    d = 1.0 - p * p
    gamma = np.zeros((2, 2, 2))
    gamma[0, 0, 0] = -p * dp[0] / d
    gamma[1, 0, 0] = dp[0] / d
    gamma[0, 1, 1] = dp[1] / d
    gamma[1, 1, 1] = -p * dp[1] / d
    return gamma


def christoffel(p: FieldLike, x: Sequence[float], mode: str = EXACT,
                eps: float = DEFAULT_SINGULAR_EPS) -> np.ndarray:
    """
    Christoffel symbols of the unit-diagonal surface metric.

    Only Gamma^1_11, Gamma^2_11, Gamma^1_22 and Gamma^2_22 can be nonzero; the
    mixed symbols vanish.

    Args:
        p: Off-diagonal field
        x: Position (x1, x2)
        mode: 'exact' (closed-form partials) or 'finite-difference'
        eps: Singularity guard on |p|

    Returns:
        Array gamma[k, i, j] = Gamma^k_ij

    Raises:
        SingularMetricError: |p(x)| >= 1 - eps
    """
    field_ = as_field(p)
    value, gradient, _ = _derivatives(field_, x, mode)
    _guard(value, x, eps)
    return _christoffel_from_values(value, gradient)


def gaussian_curvature(p: float, dp: Sequence[float], ddp) -> float:
    """K = [(1-p^2) d12 p + p d1 p d2 p] / (1-p^2)^2 from the values of p and its partials."""
    d = 1.0 - p * p
    mixed = ddp[0][1]
    return (d * mixed + p * dp[0] * dp[1]) / (d * d)


def _riemann_up_from_values(p: float, dp: np.ndarray, ddp: np.ndarray) -> np.ndarray:
    d = 1.0 - p * p
    w = (d * ddp[0, 1] + p * dp[0] * dp[1]) / (d * d)
    riemann = np.zeros((2, 2, 2, 2))
    riemann[0, 0, 1, 0] = p * w
    riemann[1, 0, 1, 0] = -w
    riemann[0, 0, 1, 1] = w
    riemann[1, 0, 1, 1] = -p * w
    riemann[:, 1, 0, :] = -riemann[:, 0, 1, :]
    return riemann


def _contract(value: float, gamma: np.ndarray, riemann_up: np.ndarray,
              position: Tuple[float, float], mode: str) -> CurvatureData:
    g = model_matrix(value, 2)
    g_inv = inverse_metric(value, 2)
    riemann_down = np.einsum('lm,mijk->ijkl', g, riemann_up)
    ricci = np.einsum('il,ijkl->jk', g_inv, riemann_down)
    scalar = float(np.einsum('jk,jk->', g_inv, ricci))
    return CurvatureData(
        position=position,
        p=float(value),
        christoffel=gamma,
        riemann_up=riemann_up,
        riemann_down=riemann_down,
        ricci=ricci,
        scalar=scalar,
        gauss=scalar / 2.0,
        mode=mode,
    )


def curvature(p: FieldLike, x: Sequence[float], mode: str = EXACT,
              eps: float = DEFAULT_SINGULAR_EPS) -> CurvatureData:
    """
    Full curvature data of the surface metric at a position.

    The Christoffel symbols and R^l_ijk come from their closed forms in p; the
    lowered tensor, Ricci tensor and scalar curvature are obtained by
    contracting with the metric, and K = S/2.

    Args:
        p: Off-diagonal field
        x: Position (x1, x2)
        mode: 'exact' or 'finite-difference'
        eps: Singularity guard on |p|

    Returns:
        CurvatureData

    Raises:
        SingularMetricError: |p(x)| >= 1 - eps
    """
    field_ = as_field(p)
    value, gradient, hessian = _derivatives(field_, x, mode)
    _guard(value, x, eps)
    position = (float(x[0]), float(x[1]))
    data = _contract(
        value,
        _christoffel_from_values(value, gradient),
        _riemann_up_from_values(value, gradient, hessian),
        position,
        mode,
    )
    logger.debug(f"Curvature of {field_} at {position}: K = {data.gauss}")
    return data


def curvature_from_metric(p: FieldLike, x: Sequence[float], mode: str = EXACT,
                          eps: float = DEFAULT_SINGULAR_EPS) -> CurvatureData:
    """
    Curvature data computed from the metric and its derivatives with the general
    Levi-Civita formulas, without using any closed form in p.
    """
    field_ = as_field(p)
    value, gradient, hessian = _derivatives(field_, x, mode)
    _guard(value, x, eps)

    off_diagonal = np.array([[0.0, 1.0], [1.0, 0.0]])
    g_inv = inverse_metric(value, 2)
    # dg[c, a, b] = d_c g_ab ; ddg[c, d, a, b] = d_c d_d g_ab
    dg = np.einsum('c,ab->cab', gradient, off_diagonal)
    ddg = np.einsum('cd,ab->cdab', hessian, off_diagonal)

    lowered = np.einsum('ilj->lij', dg) + np.einsum('jli->lij', dg) - dg
    d_lowered = np.einsum('milj->mlij', ddg) + np.einsum('mjli->mlij', ddg) - ddg
    gamma = 0.5 * np.einsum('kl,lij->kij', g_inv, lowered)

    d_g_inv = -np.einsum('ka,mab,bl->mkl', g_inv, dg, g_inv)
    d_gamma = 0.5 * (np.einsum('mkl,lij->mkij', d_g_inv, lowered)
                     + np.einsum('kl,mlij->mkij', g_inv, d_lowered))

    riemann_up = (np.einsum('iljk->lijk', d_gamma)
                  - np.einsum('jlik->lijk', d_gamma)
                  + np.einsum('lir,rjk->lijk', gamma, gamma)
                  - np.einsum('ljr,rik->lijk', gamma, gamma))
    return _contract(value, gamma, riemann_up, (float(x[0]), float(x[1])), mode)


def constant_curvature_solution(k: float, c1: float = 1.0, c2: float = 0.0, branch: str = 'minus',
                                f: Optional[FieldLike] = None) -> ScalarField:
    """
    Off-diagonal fields with constant Gaussian curvature k.

    Args:
        k: Curvature value
        c1: Nonzero scale of x1 in the tanh argument
        c2: Shift of the tanh argument
        branch: 'plus' for 2 tanh^2(c1 x1 - k x2/c1 + c2) - 1,
            'minus' for 1 - 2 tanh^2(c1 x1 + k x2/c1 + c2),
            'separable' for a one-variable field f (k must be 0)
        f: The one-variable field for the separable branch

    Returns:
        ScalarField of p

    Raises:
        InvalidInputError: c1 = 0, unknown branch, or a separable request that
            is not flat or not a function of a single variable
    """
    if c1 == 0:
        raise InvalidInputError("c1 must be nonzero")
    if branch == 'plus':
        text = f"2*tanh({c1!r}*x1 - {k / c1!r}*x2 + {c2!r})^2 - 1"
    elif branch == 'minus':
        text = f"1 - 2*tanh({c1!r}*x1 + {k / c1!r}*x2 + {c2!r})^2"
    elif branch == 'separable':
        if k != 0:
            raise InvalidInputError(f"The separable branch only has curvature 0, got k = {k}")
        if f is None:
            raise InvalidInputError("The separable branch needs a one-variable field f")
        field_ = as_field(f)
        if {'x1', 'x2'} <= field_.variables:
            raise InvalidInputError(
                f"{field_} depends on both x1 and x2; a product f1(x1) f2(x2) is flat only "
                "when f1' f2' = 0, so one factor must be constant")
        if 'x3' in field_.variables:
            raise InvalidInputError(f"{field_} depends on x3, which is not a surface coordinate")
        return field_
    else:
        raise InvalidInputError(f"Unknown branch {branch!r}; expected one of {BRANCHES}")
    logger.debug(f"Constant curvature {branch} branch for k={k}: {text}")
    return parse(text)


def verify_constant_curvature(p: FieldLike, k: float, points: Sequence[Sequence[float]], tol: float = 1e-6,
                              mode: str = EXACT,
                              metric: Optional[SymmetricSecondRoot] = None) -> ConstantCurvatureCheck:
    """
    Check K = k at every sample point.

    Points where 1 - p^2 <= 1e-6 are skipped and flagged, as are points where the
    field cannot be evaluated. When the second-root metric behind p is given,
    points where a(x) <= 0 are flagged as irregular.

    Returns:
        ConstantCurvatureCheck; passes iff every evaluated residual is within tol,
        at least one point was evaluated and no point is irregular
    """
    field_ = as_field(p)
    check = ConstantCurvatureCheck(expression=str(field_), k=float(k), tol=float(tol), mode=mode)
    for x in points:
        position = (float(x[0]), float(x[1]))
        irregular = regularity_error(metric, position)
        if irregular is not None:
            check.samples.append(CurvatureSample(position, None, None, None, error=irregular, irregular=True))
            continue
        try:
            value, gradient, hessian = _derivatives(field_, position, mode)
        except ArithmeticError as e:
            logger.warning(f"Could not evaluate {field_} at {position}: {e}")
            check.samples.append(CurvatureSample(position, None, None, None, error=str(e)))
            continue
        if not np.isfinite(value) or 1.0 - value * value <= SINGULAR_SAMPLE_MARGIN:
            logger.warning(f"Skipping singular sample point {position} (p = {value})")
            check.samples.append(CurvatureSample(position, float(value), None, None, singular=True))
            continue
        gauss = gaussian_curvature(value, gradient, hessian)
        residual = abs(gauss - k)
        if not np.isfinite(residual):
            check.samples.append(CurvatureSample(position, float(value), None, None, error='non-finite curvature'))
            continue
        check.samples.append(CurvatureSample(position, float(value), float(gauss), float(residual)))
    logger.info(f"Constant curvature check k={k} for {field_}: "
                f"{'pass' if check.passed else 'fail'} (worst residual {check.worst_residual})")
    return check


def grid_points(region: Dict[str, Sequence[float]], grid: Sequence[int]) -> List[Tuple[float, float]]:
    """Nodes of a regular grid over region {'min': [..], 'max': [..]}, x1 varying fastest."""
    axes = [np.linspace(lo, hi, int(count)) for lo, hi, count in zip(region['min'], region['max'], grid)]
    return [(float(x1), float(x2)) for x2 in axes[1] for x1 in axes[0]]


def random_points(region: Dict[str, Sequence[float]], count: int, seed: int) -> List[Tuple[float, float]]:
    """Uniform random points in a box, reproducible from the seed."""
    rng = np.random.default_rng(seed)
    lo = np.asarray(region['min'], dtype=float)
    hi = np.asarray(region['max'], dtype=float)
    return [tuple(float(v) for v in row) for row in rng.uniform(lo, hi, size=(count, len(lo)))]


def curvature_grid(p: FieldLike, region: Dict[str, Sequence[float]], grid: Sequence[int],
                   mode: str = EXACT, k: Optional[float] = None) -> pd.DataFrame:
    """
    Gaussian curvature on a grid.

    Returns:
        DataFrame with columns x1, x2, p, K, singular (and residual when k is given)
    """
    field_ = as_field(p)
    rows = []
    for x in grid_points(region, grid):
        row = {'x1': x[0], 'x2': x[1], 'p': np.nan, 'K': np.nan, 'singular': False}
        try:
            value, gradient, hessian = _derivatives(field_, x, mode)
            row['p'] = float(value)
            if 1.0 - value * value <= SINGULAR_SAMPLE_MARGIN:
                row['singular'] = True
            else:
                row['K'] = float(gaussian_curvature(value, gradient, hessian))
        except ArithmeticError as e:
            logger.warning(f"Could not evaluate {field_} at {x}: {e}")
            row['singular'] = True
        if k is not None:
            row['residual'] = abs(row['K'] - k)
        rows.append(row)
    return pd.DataFrame(rows)
