"""
Closed-form first and second partials of expression fields.

Evaluates an expression tree together with its gradient and Hessian by
applying the chain rule node by node (second-order forward mode). This is the
exact-partials path used by the curvature formulas; finite differences from
polynomial.exprfield.partial are the independent cross-check.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

import numpy as np

from errors import FieldEvaluationError
from polynomial.exprfield import (
    VARIABLES, BinaryOp, Call, Constant, Node, ScalarField, UnaryOp, Variable, evaluate,
)

logger = logging.getLogger(__name__)

_DIM = len(VARIABLES)


@dataclass(frozen=True)
class Jet:
    """Value, gradient and Hessian of a field at one position (all three variables)."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    @classmethod
    def constant(cls, value: float) -> 'Jet':
        return cls(float(value), np.zeros(_DIM), np.zeros((_DIM, _DIM)))

    @classmethod
    def variable(cls, index: int, value: float) -> 'Jet':
        gradient = np.zeros(_DIM)
        gradient[index] = 1.0
        return cls(float(value), gradient, np.zeros((_DIM, _DIM)))

    def __add__(self, other: 'Jet') -> 'Jet':
        return Jet(self.value + other.value, self.gradient + other.gradient, self.hessian + other.hessian)

    def __sub__(self, other: 'Jet') -> 'Jet':
        return Jet(self.value - other.value, self.gradient - other.gradient, self.hessian - other.hessian)

    def __neg__(self) -> 'Jet':
        return Jet(-self.value, -self.gradient, -self.hessian)

    def __mul__(self, other: 'Jet') -> 'Jet':
        cross = np.outer(self.gradient, other.gradient)
        return Jet(
            self.value * other.value,
            self.value * other.gradient + other.value * self.gradient,
            self.value * other.hessian + other.value * self.hessian + cross + cross.T,
        )

    def compose(self, f: float, df: float, d2f: float) -> 'Jet':
        """Apply a scalar function with value f, derivative df and second derivative d2f at self.value."""
        return Jet(
            f,
            df * self.gradient,
            df * self.hessian + d2f * np.outer(self.gradient, self.gradient),
        )


def _function_jet(name: str, u: Jet) -> Jet:
    t = u.value
    with np.errstate(all='ignore'):
        if name == 'sin':
            return u.compose(np.sin(t), np.cos(t), -np.sin(t))
        if name == 'cos':
            return u.compose(np.cos(t), -np.sin(t), -np.cos(t))
        if name == 'tan':
            tan = np.tan(t)
            sec2 = 1.0 + tan * tan
            return u.compose(tan, sec2, 2.0 * tan * sec2)
        if name == 'tanh':
            tanh = np.tanh(t)
            sech2 = 1.0 - tanh * tanh
            return u.compose(tanh, sech2, -2.0 * tanh * sech2)
        if name == 'sqrt':
            root = np.sqrt(t)
            return u.compose(root, 0.5 / root, -0.25 / (root * t))
        if name == 'exp':
            e = np.exp(t)
            return u.compose(e, e, e)
        if name == 'abs':
            return u.compose(abs(t), float(np.sign(t)), 0.0)
    raise FieldEvaluationError(f"No derivative rule for function '{name}'")


def _power_jet(base: Jet, exponent: float) -> Jet:
    k = exponent
    if k == 0:
        return Jet.constant(1.0)
    t = base.value
    with np.errstate(all='ignore'):
        f = np.power(t, k)
        df = k * np.power(t, k - 1) if k != 1 else 1.0
        d2f = k * (k - 1) * np.power(t, k - 2) if k not in (1, 2) else float(k * (k - 1))
    return base.compose(float(f), float(df), float(d2f))


def _jet(node: Node, position: Sequence[float]) -> Jet:
    if isinstance(node, Constant):
        return Jet.constant(node.value)
    if isinstance(node, Variable):
        index = VARIABLES.index(node.name)
        return Jet.variable(index, position[index])
    if isinstance(node, UnaryOp):
        operand = _jet(node.operand, position)
        return -operand if node.op == '-' else operand
    if isinstance(node, Call):
        return _function_jet(node.function, _jet(node.argument, position))
    if isinstance(node, BinaryOp):
        left = _jet(node.left, position)
        if node.op == '^':
            exponent = evaluate(ScalarField(node.right), _padded(position))
            if exponent != int(exponent):
                raise FieldEvaluationError(f"Exponent must be an integer, got {exponent}")
            return _power_jet(left, int(exponent))
        right = _jet(node.right, position)
        if node.op == '+':
            return left + right
        if node.op == '-':
            return left - right
        if node.op == '*':
            return left * right
        if node.op == '/':
            t = right.value
            with np.errstate(all='ignore'):
                reciprocal = right.compose(1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t))
            return left * reciprocal
    raise FieldEvaluationError(f"Unhandled expression node {node!r}")


def _padded(x) -> Tuple[float, ...]:
    if isinstance(x, Mapping):
        return tuple(float(x.get(name, 0.0)) for name in VARIABLES)
    values = [float(v) for v in x]
    return tuple(values + [0.0] * (_DIM - len(values)))


def jet(field: ScalarField, x) -> Jet:
    """
    Value, gradient and Hessian of a field at a position.

    Args:
        field: Parsed field
        x: Position; variables the field uses must be supplied

    Returns:
        Jet over (x1, x2, x3)
    """
    if not isinstance(x, Mapping):
        supplied = set(VARIABLES[:len(x)])
        missing = field.variables - supplied
        if missing:
            name = sorted(missing)[0]
            raise FieldEvaluationError(f"Position does not supply variable '{name}' for {field}", variable=name)
    return _jet(field.expression, _padded(x))


def surface_partials(field: ScalarField, x) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Closed-form (p, [d1 p, d2 p], [[d11 p, d12 p], [d21 p, d22 p]]) at a surface point.
    """
    result = jet(field, x)
    return result.value, result.gradient[:2].copy(), result.hessian[:2, :2].copy()
