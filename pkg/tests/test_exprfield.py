"""
Tests for the expression field module.
"""

import math
import unittest

import numpy as np

import sys
import os

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from errors import ExpressionSyntaxError, FieldEvaluationError, InvalidInputError, UnknownIdentifierError
from polynomial.exprfield import as_field, constant_field, evaluate, parse, partial


class TestParse(unittest.TestCase):
    """Test cases for parsing and evaluation."""

    def test_example_coefficients(self):
        self.assertEqual(evaluate(parse("cos(x1*x2)+2"), (0.0, 0.0)), 3.0)
        self.assertEqual(evaluate(parse("sqrt(2)*sin(x1*x2)"), (0.0, 5.0)), 0.0)
        self.assertAlmostEqual(evaluate(parse("tanh(x1)"), (1e6,)), 1.0, delta=1e-12)

    def test_constant(self):
        field = parse("2")
        self.assertTrue(field.is_constant)
        self.assertEqual(field.arity, 0)
        self.assertEqual(evaluate(field, ()), 2.0)

    def test_arity_and_variables(self):
        field = parse("x1 + x3")
        self.assertEqual(field.variables, frozenset({'x1', 'x3'}))
        self.assertEqual(field.arity, 3)

    def test_precedence(self):
        self.assertEqual(evaluate(parse("-x1^2"), (3.0,)), -9.0)
        self.assertEqual(evaluate(parse("2^3^2"), ()), 512.0)
        self.assertEqual(evaluate(parse("1 + 2*3 - 4/2"), ()), 5.0)
        self.assertEqual(evaluate(parse("2^-1"), ()), 0.5)

    def test_tanh_solution_text(self):
        value = evaluate(parse("1-2*tanh(x1+x2)^2"), (0.25, 0.5))
        self.assertAlmostEqual(value, 1 - 2 * math.tanh(0.75) ** 2, places=14)

    def test_whitespace_insensitive(self):
        self.assertEqual(evaluate(parse("  x1 *\tx2 "), (2.0, 3.0)), 6.0)

    def test_syntax_error_offset(self):
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse("x1 + * 2")
        self.assertEqual(ctx.exception.offset, 5)

    def test_out_of_range_literal(self):
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse("x1 + 1e400")
        self.assertEqual(ctx.exception.offset, 5)
        self.assertNotIsInstance(ctx.exception, UnknownIdentifierError)
        with self.assertRaises(ExpressionSyntaxError):
            parse("-1e999*x2")
        for value in (float('inf'), float('-inf'), float('nan')):
            with self.assertRaises(InvalidInputError):
                as_field(value)

    def test_empty_expression(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse("   ")

    def test_unknown_identifiers(self):
        with self.assertRaises(UnknownIdentifierError) as ctx:
            parse("foo(x1)")
        self.assertEqual(ctx.exception.name, 'foo')
        self.assertEqual(ctx.exception.offset, 0)

        with self.assertRaises(UnknownIdentifierError) as ctx:
            parse("1 + x4")
        self.assertEqual(ctx.exception.name, 'x4')
        self.assertEqual(ctx.exception.offset, 4)

    def test_canonical_text_reparses_to_same_tree(self):
        for text in ("cos(x1*x2)+2", "-x1^2 + 3/x2", "1-2*tanh(x1+x2)^2", "sqrt(abs(x1 - x3))*exp(-x2)"):
            field = parse(text)
            self.assertEqual(parse(field.canonical()).expression, field.expression)

    def test_as_field(self):
        self.assertEqual(evaluate(as_field(2.5), ()), 2.5)
        self.assertEqual(evaluate(as_field(-4), ()), -4.0)
        self.assertEqual(evaluate(as_field("x2"), (0.0, 7.0)), 7.0)
        field = parse("x1")
        self.assertIs(as_field(field), field)
        with self.assertRaises(InvalidInputError):
            as_field(True)


class TestEvaluate(unittest.TestCase):
    """Test cases for evaluate."""

    def test_missing_variable(self):
        with self.assertRaises(FieldEvaluationError) as ctx:
            evaluate(parse("x2 + 1"), (1.0,))
        self.assertEqual(ctx.exception.variable, 'x2')

    def test_non_integer_exponent(self):
        with self.assertRaises(FieldEvaluationError):
            evaluate(parse("x1^0.5"), (4.0,))

    def test_nan_propagates(self):
        self.assertTrue(math.isnan(evaluate(parse("sqrt(x1)"), (-1.0,))))
        self.assertTrue(math.isinf(evaluate(parse("1/x1"), (0.0,))))

    def test_mapping_position(self):
        self.assertEqual(evaluate(parse("x1 - x2"), {'x1': 5.0, 'x2': 2.0}), 3.0)

    def test_grid_evaluation(self):
        x1, x2 = np.meshgrid(np.linspace(-1, 1, 4), np.linspace(0, 2, 3))
        values = evaluate(parse("x1*x2 + 1"), (x1, x2))
        np.testing.assert_allclose(values, x1 * x2 + 1)
        constant = evaluate(constant_field(3.0), (x1, x2))
        self.assertEqual(constant.shape, x1.shape)

    def test_callable(self):
        self.assertEqual(parse("x1 + 1")((1.0,)), 2.0)


class TestPartial(unittest.TestCase):
    """Test cases for finite-difference partials."""

    def test_first_partial(self):
        self.assertAlmostEqual(partial(parse("x1^2"), 'x1', (3.0,), step=1e-5), 6.0, delta=1e-8)

    def test_constant_partial(self):
        self.assertAlmostEqual(partial(parse("7"), 1, (0.3, 0.4)), 0.0, delta=1e-10)
        self.assertAlmostEqual(partial(parse("7"), ('x1', 'x2'), (0.3, 0.4)), 0.0, delta=1e-10)

    def test_mixed_partial(self):
        field = parse("x1*x2")
        for x in ((0.3, -1.2), (5.0, 2.0), (-3.0, 0.0)):
            self.assertAlmostEqual(partial(field, ('x1', 'x2'), x), 1.0, delta=1e-6)

    def test_cubic_matches_exact(self):
        field = parse("x1^3 - 2*x1*x2 + x2^2")
        rng = np.random.default_rng(17)
        for _ in range(20):
            x1, x2 = rng.uniform(-10, 10, size=2)
            exact1 = 3 * x1 * x1 - 2 * x2
            exact2 = -2 * x1 + 2 * x2
            self.assertAlmostEqual(partial(field, 1, (x1, x2)), exact1, delta=1e-7 * max(1.0, abs(exact1)))
            self.assertAlmostEqual(partial(field, 2, (x1, x2)), exact2, delta=1e-7 * max(1.0, abs(exact2)))

    def test_second_partial(self):
        self.assertAlmostEqual(partial(parse("x2^3"), ('x2', 'x2'), (0.0, 2.0)), 12.0, delta=1e-5)

    def test_bad_step(self):
        with self.assertRaises(InvalidInputError):
            partial(parse("x1"), 1, (1.0,), step=0.0)


if __name__ == '__main__':
    unittest.main()
