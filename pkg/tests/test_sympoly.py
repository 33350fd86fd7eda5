"""
Tests for the symmetric polynomial module.
"""

import unittest
from fractions import Fraction

import numpy as np

import sys
import os

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from errors import InvalidInputError
from polynomial.sympoly import (
    CharPolyCoeffs2D, CharPolyCoeffs3D, CharPolyCoeffs4D, CoefficientSet2D, CoefficientSet3D,
    DensePolynomial, SecondRootCharPoly, characteristic_polynomial_coefficients, charpoly_to_monomial_2d,
    charpoly_to_monomial_3d, elementary_symmetric, expand_charpoly, is_symmetric, monomial_form_2d,
    monomial_form_3d, monomial_to_charpoly_2d, monomial_to_charpoly_3d, symmetrize,
)


class TestDensePolynomial(unittest.TestCase):
    """Test cases for DensePolynomial."""

    def test_rejects_odd_degree(self):
        with self.assertRaises(InvalidInputError):
            DensePolynomial(2, 3, {(3, 0): 1})

    def test_rejects_exponent_with_wrong_sum(self):
        with self.assertRaises(InvalidInputError):
            DensePolynomial(2, 4, {(3, 0): 1})

    def test_drops_zero_coefficients(self):
        p = DensePolynomial(2, 4, {(4, 0): 1, (2, 2): 0})
        self.assertEqual(list(p.coefficients), [(4, 0)])
        self.assertEqual(p.coefficient((2, 2)), 0)

    def test_evaluation_is_homogeneous(self):
        p = monomial_form_3d(CoefficientSet3D(1.5, -0.3, 2.0, 0.7))
        rng = np.random.default_rng(7)
        for _ in range(20):
            y = rng.normal(size=3)
            t = rng.uniform(0.1, 3.0)
            self.assertAlmostEqual(p.evaluate(t * y), t ** 4 * p.evaluate(y), delta=1e-9 * (1 + abs(p.evaluate(t * y))))

    def test_evaluates_stacks(self):
        p = monomial_form_2d(CoefficientSet2D(1, 2, 3))
        y = np.array([[1.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(p.evaluate(y), [1.0, 9.0])

    def test_gradient_and_hessian(self):
        # y1^2 y2^2
        p = DensePolynomial(2, 4, {(2, 2): 1})
        np.testing.assert_allclose(p.gradient((1.0, 2.0)), [8.0, 4.0])
        np.testing.assert_allclose(p.hessian((1.0, 2.0)), [[8.0, 8.0], [8.0, 2.0]])


class TestElementarySymmetric(unittest.TestCase):
    """Test cases for elementary_symmetric."""

    def test_examples(self):
        self.assertEqual(elementary_symmetric((1, 1)), (2, 1))
        self.assertEqual(elementary_symmetric((1, 2, 3)), (6, 11, 6))
        self.assertEqual(elementary_symmetric((5, 0, 0, 0)), (5, 0, 0, 0))

    def test_empty_tuple(self):
        with self.assertRaises(InvalidInputError):
            elementary_symmetric(())

    def test_matches_characteristic_polynomial(self):
        rng = np.random.default_rng(11)
        for n in range(1, 7):
            y = rng.normal(size=n)
            s = elementary_symmetric(tuple(y))
            coefficients = characteristic_polynomial_coefficients(y)
            for k in range(1, n + 1):
                self.assertAlmostEqual(coefficients[k], (-1) ** k * s[k - 1], places=10)


class TestSymmetrize(unittest.TestCase):
    """Test cases for symmetrize and is_symmetric."""

    def test_two_variables(self):
        result = symmetrize(DensePolynomial(2, 4, {(4, 0): 1}))
        self.assertEqual(result.coefficient((4, 0)), Fraction(1, 2))
        self.assertEqual(result.coefficient((0, 4)), Fraction(1, 2))
        self.assertEqual(len(result.coefficients), 2)

    def test_three_variables(self):
        result = symmetrize(DensePolynomial(3, 4, {(3, 1, 0): 1}))
        self.assertEqual(len(result.coefficients), 6)
        for value in result.coefficients.values():
            self.assertEqual(value, Fraction(1, 6))

    def test_symmetric_input_is_fixed(self):
        p = monomial_form_2d(CoefficientSet2D(1, 2, 3))
        self.assertTrue(symmetrize(p).is_close(p))

    def test_idempotent_and_invariant(self):
        p = DensePolynomial(3, 4, {(2, 1, 1): 2.0, (4, 0, 0): -1.0, (1, 3, 0): 0.5})
        once = symmetrize(p)
        self.assertTrue(symmetrize(once).is_close(once))
        self.assertTrue(is_symmetric(once))
        self.assertFalse(is_symmetric(p))

    def test_too_many_variables(self):
        with self.assertRaises(InvalidInputError):
            symmetrize(DensePolynomial(7, 2, {(2, 0, 0, 0, 0, 0, 0): 1}))


class TestTransforms(unittest.TestCase):
    """Test cases for the basis transforms."""

    def test_2d_examples(self):
        self.assertEqual(charpoly_to_monomial_2d(CharPolyCoeffs2D(1, 0, 0)), CoefficientSet2D(1, 4, 6))
        self.assertEqual(charpoly_to_monomial_2d(CharPolyCoeffs2D(0, 0, 1)), CoefficientSet2D(0, 0, 1))
        self.assertEqual(charpoly_to_monomial_2d(CharPolyCoeffs2D(1, 1, 1)), CoefficientSet2D(1, 5, 9))

    def test_2d_inverse_examples(self):
        self.assertEqual(monomial_to_charpoly_2d(CoefficientSet2D(1, 4, 6)), CharPolyCoeffs2D(1, 0, 0))
        self.assertEqual(monomial_to_charpoly_2d(CoefficientSet2D(1, 5, 9)), CharPolyCoeffs2D(1, 1, 1))

    def test_2d_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b, c = rng.uniform(-10, 10, size=3)
            back = monomial_to_charpoly_2d(charpoly_to_monomial_2d(CharPolyCoeffs2D(a, b, c)))
            for original, value in zip((a, b, c), (back.a, back.b, back.c)):
                self.assertAlmostEqual(original, value, delta=1e-12 * (1 + abs(original)) * 10)

    def test_exact_round_trip(self):
        original = CharPolyCoeffs2D(Fraction(1, 3), Fraction(-7, 5), Fraction(2, 9))
        monomial = charpoly_to_monomial_2d(original, exact=True)
        self.assertIsInstance(monomial.m, Fraction)
        self.assertEqual(monomial_to_charpoly_2d(monomial, exact=True), original)

    def test_3d_examples(self):
        self.assertEqual(charpoly_to_monomial_3d(CharPolyCoeffs3D(1, 0, 0, 0)), CoefficientSet3D(1, 4, 6, 12))
        self.assertEqual(charpoly_to_monomial_3d(CharPolyCoeffs3D(0, 0, 0, 1)), CoefficientSet3D(0, 0, 0, 1))
        self.assertEqual(charpoly_to_monomial_3d(CharPolyCoeffs3D(1, 1, 1, 1)), CoefficientSet3D(1, 5, 9, 20))

    def test_3d_inverse(self):
        original = CharPolyCoeffs3D(2, -3, 5, 7)
        self.assertEqual(monomial_to_charpoly_3d(charpoly_to_monomial_3d(original)), original)


class TestExpandCharpoly(unittest.TestCase):
    """Test cases for expand_charpoly."""

    def test_s1_to_the_fourth(self):
        p = expand_charpoly(CharPolyCoeffs2D(1, 0, 0), 2)
        self.assertEqual(p.coefficients, {(4, 0): 1, (3, 1): 4, (2, 2): 6, (1, 3): 4, (0, 4): 1})

    def test_s2_squared(self):
        p = expand_charpoly(CharPolyCoeffs2D(0, 0, 1), 2)
        self.assertEqual(p.coefficients, {(2, 2): 1})

    def test_s1_s3(self):
        p = expand_charpoly(CharPolyCoeffs3D(0, 0, 0, 1), 3)
        self.assertEqual(p.coefficients, {(2, 1, 1): 1, (1, 2, 1): 1, (1, 1, 2): 1})

    def test_dimension_mismatch(self):
        with self.assertRaises(InvalidInputError):
            expand_charpoly(CharPolyCoeffs2D(1, 0, 0), 3)

    def test_agrees_with_monomial_forms(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            c2 = CharPolyCoeffs2D(*rng.uniform(-5, 5, size=3))
            c3 = CharPolyCoeffs3D(*rng.uniform(-5, 5, size=4))
            y2 = rng.normal(size=2)
            y3 = rng.normal(size=3)
            expected2 = monomial_form_2d(charpoly_to_monomial_2d(c2)).evaluate(y2)
            expected3 = monomial_form_3d(charpoly_to_monomial_3d(c3)).evaluate(y3)
            self.assertAlmostEqual(expand_charpoly(c2).evaluate(y2), expected2, delta=1e-12 * (1 + abs(expected2)) * 100)
            self.assertAlmostEqual(expand_charpoly(c3).evaluate(y3), expected3, delta=1e-12 * (1 + abs(expected3)) * 100)

    def test_four_dimensional_and_second_root(self):
        p4 = expand_charpoly(CharPolyCoeffs4D(1, 2, 3, 4, 5))
        self.assertEqual((p4.dimension, p4.degree), (4, 4))
        self.assertTrue(is_symmetric(p4))
        self.assertEqual(p4.coefficient((1, 1, 1, 1)), 24 + 2 * 12 + 3 * 6 + 4 * 4 + 5)

        p2 = expand_charpoly(SecondRootCharPoly(1, 0, n=3))
        self.assertEqual(p2.degree, 2)
        self.assertEqual(p2.coefficient((2, 0, 0)), 1)
        self.assertEqual(p2.coefficient((1, 1, 0)), 2)


if __name__ == '__main__':
    unittest.main()
