"""
Position-dependent coefficient expressions.

Coefficients such as l(x) = cos(x1*x2) + 2 are written as plain expression
strings in metric configs. They are parsed with an LALR grammar into a small
immutable syntax tree and evaluated with numpy, so the same field can be
evaluated at a point or over a whole grid.

Grammar: numbers, x1|x2|x3, + - * / ^, unary minus, parentheses and the
functions sin, cos, tan, tanh, sqrt, exp, abs. ^ is right-associative, takes
an integer exponent and binds tighter than unary minus (-x1^2 == -(x1^2)).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from errors import ExpressionSyntaxError, FieldEvaluationError, InvalidInputError, UnknownIdentifierError

logger = logging.getLogger(__name__)

VARIABLES: Tuple[str, ...] = ('x1', 'x2', 'x3')

FUNCTIONS: Dict[str, Callable] = {
    'sin': np.sin,
    'cos': np.cos,
    'tan': np.tan,
    'tanh': np.tanh,
    'sqrt': np.sqrt,
    'exp': np.exp,
    'abs': np.abs,
}

DEFAULT_STEP_SCALE = 1e-5
DEFAULT_SECOND_STEP_SCALE = 4e-3

_GRAMMAR = r"""
    ?start: sum

    ?sum: product
        | sum "+" product       -> add
        | sum "-" product       -> sub

    ?product: unary
        | product "*" unary     -> mul
        | product "/" unary     -> div

    ?unary: power
        | "-" unary             -> neg
        | "+" unary             -> pos

    ?power: atom
        | atom "^" exponent     -> pow

    ?exponent: power
        | "-" exponent          -> neg
        | "+" exponent          -> pos

    ?atom: NUMBER               -> number
        | NAME "(" sum ")"      -> call
        | NAME                  -> name
        | "(" sum ")"

    NAME: /[A-Za-z_][A-Za-z0-9_]*/

    %import common.NUMBER
    %import common.WS
    %ignore WS
"""


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class UnaryOp:
    op: str
    operand: 'Node'


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: 'Node'
    right: 'Node'


@dataclass(frozen=True)
class Call:
    function: str
    argument: 'Node'


Node = Union[Constant, Variable, UnaryOp, BinaryOp, Call]


class _TreeBuilder(Transformer):
    """Turns the lark parse tree into immutable expression nodes."""

    def __init__(self, text: str):
        super().__init__()
        self._text = text

    def _offset(self, token: Token) -> int:
        return _byte_offset(self._text, token.start_pos)

    def number(self, children):
        token = children[0]
        value = float(token)
        if not math.isfinite(value):
            raise ExpressionSyntaxError(f"Numeric literal {str(token)!r} is out of range", self._offset(token))
        return Constant(value)

    def name(self, children):
        token = children[0]
        if str(token) not in VARIABLES:
            raise UnknownIdentifierError(str(token), self._offset(token))
        return Variable(str(token))

    def call(self, children):
        token, argument = children
        if str(token) not in FUNCTIONS:
            raise UnknownIdentifierError(str(token), self._offset(token))
        return Call(str(token), argument)

    def add(self, children):
        return BinaryOp('+', *children)

    def sub(self, children):
        return BinaryOp('-', *children)

    def mul(self, children):
        return BinaryOp('*', *children)

    def div(self, children):
        return BinaryOp('/', *children)

    def pow(self, children):
        return BinaryOp('^', *children)

    def neg(self, children):
        return UnaryOp('-', children[0])

    def pos(self, children):
        return UnaryOp('+', children[0])


_PARSER = Lark(_GRAMMAR, start='start', parser='lalr')


def _byte_offset(text: str, position: Optional[int]) -> int:
    if position is None or position < 0:
        position = len(text)
    return len(text[:position].encode('utf-8'))


def _free_variables(node: Node) -> FrozenSet[str]:
    if isinstance(node, Variable):
        return frozenset([node.name])
    if isinstance(node, UnaryOp):
        return _free_variables(node.operand)
    if isinstance(node, BinaryOp):
        return _free_variables(node.left) | _free_variables(node.right)
    if isinstance(node, Call):
        return _free_variables(node.argument)
    return frozenset()


def to_text(node: Node) -> str:
    """Canonical, fully parenthesized text of an expression tree."""
    if isinstance(node, Constant):
        if node.value < 0:
            return f"(-{repr(-node.value)})"
        return repr(node.value)
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, UnaryOp):
        return f"({node.op}{to_text(node.operand)})"
    if isinstance(node, BinaryOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.function}({to_text(node.argument)})"
    raise TypeError(f"Unhandled expression node {node!r}")


@dataclass(frozen=True)
class ScalarField:
    """
    A real function of position backed by a parsed expression.

    Attributes:
        expression: Root node of the syntax tree
        text: Source text (canonical text for programmatically built fields)
    """

    expression: Node
    text: str = ''

    @property
    def variables(self) -> FrozenSet[str]:
        return _free_variables(self.expression)

    @property
    def arity(self) -> int:
        """Number of position variables needed, i.e. the highest variable index used."""
        used = [VARIABLES.index(v) + 1 for v in self.variables]
        return max(used) if used else 0

    @property
    def is_constant(self) -> bool:
        return not self.variables

    def canonical(self) -> str:
        return to_text(self.expression)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def __str__(self) -> str:
        return self.text or self.canonical()


def parse(text: str) -> ScalarField:
    """
    Parse an expression string into a ScalarField.

    Args:
        text: Expression text, e.g. "cos(x1*x2)+2"

    Returns:
        Parsed field

    Raises:
        ExpressionSyntaxError: malformed input (with byte offset)
        UnknownIdentifierError: unknown variable or function name
    """
    if text is None or not str(text).strip():
        raise ExpressionSyntaxError("Empty expression", 0)
    text = str(text)
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as e:
        offset = _byte_offset(text, getattr(e, 'pos_in_stream', None))
        raise ExpressionSyntaxError(f"Syntax error in expression {text!r}", offset) from None
    try:
        expression = _TreeBuilder(text).transform(tree)
    except VisitError as e:
        raise e.orig_exc from None
    logger.debug(f"Parsed expression {text!r} -> {to_text(expression)}")
    return ScalarField(expression, text)


def constant_field(value: float) -> ScalarField:
    """A ScalarField holding a constant."""
    if not math.isfinite(value):
        raise InvalidInputError(f"Constant fields must be finite, got {value}")
    node = Constant(float(value)) if value >= 0 else UnaryOp('-', Constant(float(-value)))
    return ScalarField(node, repr(float(value)))


def as_field(value: Union[str, float, int, ScalarField]) -> ScalarField:
    """Coerce a number, expression string or field into a ScalarField."""
    if isinstance(value, ScalarField):
        return value
    if isinstance(value, bool):
        raise InvalidInputError(f"Boolean {value!r} is not a coefficient")
    if isinstance(value, (int, float)):
        return constant_field(value)
    return parse(value)


def _bindings(field: ScalarField, x) -> Dict[str, object]:
    if isinstance(x, Mapping):
        values = dict(x)
    else:
        values = {name: value for name, value in zip(VARIABLES, x)}
    for name in field.variables:
        if name not in values:
            raise FieldEvaluationError(f"Position does not supply variable '{name}' for {field}", variable=name)
    return values


def _evaluate_node(node: Node, values: Mapping[str, object]):
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, Variable):
        return values[node.name]
    if isinstance(node, UnaryOp):
        operand = _evaluate_node(node.operand, values)
        return -operand if node.op == '-' else operand
    if isinstance(node, Call):
        return FUNCTIONS[node.function](_evaluate_node(node.argument, values))
    if isinstance(node, BinaryOp):
        left = _evaluate_node(node.left, values)
        right = _evaluate_node(node.right, values)
        if node.op == '+':
            return left + right
        if node.op == '-':
            return left - right
        if node.op == '*':
            return left * right
        if node.op == '/':
            return np.divide(left, right)
        if node.op == '^':
            exponent = np.asarray(right, dtype=float)
            if not np.all(np.mod(exponent, 1.0) == 0):
                raise FieldEvaluationError(f"Exponent must be an integer, got {right}")
            return np.power(np.asarray(left, dtype=float), exponent)
    raise FieldEvaluationError(f"Unhandled expression node {node!r}")


def evaluate(field: ScalarField, x) -> Union[float, np.ndarray]:
    """
    Evaluate a field at a position.

    Args:
        field: Parsed field
        x: Position tuple (x1, x2[, x3]) or mapping of variable names; entries may be numpy arrays

    Returns:
        IEEE value (NaN/Inf propagate); an array when the position entries are arrays
    """
    values = _bindings(field, x)
    with np.errstate(all='ignore'):
        result = _evaluate_node(field.expression, values)
    result = np.asarray(result, dtype=float)
    if any(np.ndim(v) for v in values.values()):
        shape = np.broadcast(*[np.asarray(v) for v in values.values()]).shape
        return np.broadcast_to(result, shape).copy()
    return float(result)


def _index(variable: Union[int, str]) -> int:
    if isinstance(variable, str):
        if variable not in VARIABLES:
            raise InvalidInputError(f"Unknown variable {variable!r}")
        return VARIABLES.index(variable)
    if not 1 <= variable <= len(VARIABLES):
        raise InvalidInputError(f"Variable index must be 1..{len(VARIABLES)}, got {variable}")
    return variable - 1


def default_step(x: Sequence[float], index: int, scale: float = DEFAULT_STEP_SCALE) -> float:
    """Scale-aware step h = scale * max(1, |x_i|)."""
    if index >= len(x):
        return scale
    return scale * max(1.0, abs(float(x[index])))


def _step_for(x: Sequence[float], index: int, step: Optional[float], scale: float) -> float:
    return step if step is not None else default_step(x, index, scale)


def _shifted(x: Sequence[float], shifts: Mapping[int, float]) -> Tuple[float, ...]:
    point = [float(v) for v in x]
    for index, delta in shifts.items():
        while len(point) <= index:
            point.append(0.0)
        point[index] += delta
    return tuple(point)


def _second_difference(field: ScalarField, x: Tuple[float, ...], i: int, j: int, hi: float, hj: float) -> float:
    if i == j:
        return (evaluate(field, _shifted(x, {i: hi})) - 2.0 * evaluate(field, x)
                + evaluate(field, _shifted(x, {i: -hi}))) / (hi * hi)
    return (evaluate(field, _shifted(x, {i: hi, j: hj})) - evaluate(field, _shifted(x, {i: hi, j: -hj}))
            - evaluate(field, _shifted(x, {i: -hi, j: hj})) + evaluate(field, _shifted(x, {i: -hi, j: -hj}))) / (4.0 * hi * hj)


def partial(field: ScalarField, variable, x: Sequence[float], step: Optional[float] = None) -> float:
    """
    Finite-difference partial derivative of a field.

    Args:
        field: Field to differentiate
        variable: 'x1'/'x2'/'x3' or 1..3 for a first partial; a pair such as
            ('x1', 'x2') for a second partial (mixed pairs use the 4-point cross stencil).
            Second partials combine steps h and h/2 by Richardson extrapolation,
            so their truncation error is O(h^4)
        x: Position
        step: Step h > 0; defaults to 1e-5*max(1,|x_i|) for first partials and
            4e-3*max(1,|x_i|) for second partials

    Returns:
        Central difference estimate
    """
    if step is not None and step <= 0:
        raise InvalidInputError(f"Finite difference step must be positive, got {step}")
    x = tuple(float(v) for v in x)

    if isinstance(variable, (tuple, list)):
        i, j = (_index(v) for v in variable)
        hi = _step_for(x, i, step, DEFAULT_SECOND_STEP_SCALE)
        hj = _step_for(x, j, step, DEFAULT_SECOND_STEP_SCALE)
        coarse = _second_difference(field, x, i, j, hi, hj)
        fine = _second_difference(field, x, i, j, 0.5 * hi, 0.5 * hj)
        return (4.0 * fine - coarse) / 3.0

    i = _index(variable)
    h = _step_for(x, i, step, DEFAULT_STEP_SCALE)
    return (evaluate(field, _shifted(x, {i: h})) - evaluate(field, _shifted(x, {i: -h}))) / (2.0 * h)
