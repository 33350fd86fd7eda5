"""
Exception types shared across the toolkit.
"""

from typing import Optional


class SymFinslerError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(SymFinslerError, ValueError):
    """Raised when an operation receives input outside its precondition."""


class ConfigError(SymFinslerError):
    """Raised for malformed settings or metric configuration files."""


class ExpressionSyntaxError(SymFinslerError, ValueError):
    """
    Raised when a coefficient expression cannot be parsed.

    Attributes:
        offset: Byte offset into the UTF-8 encoded expression text
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    """Raised when an expression names a variable or function that does not exist."""

    def __init__(self, name: str, offset: int):
        super().__init__(f"Unknown identifier '{name}'", offset)
        self.name = name


class FieldEvaluationError(SymFinslerError, ArithmeticError):
    """Raised when a scalar field cannot be evaluated at a position."""

    def __init__(self, message: str, variable: Optional[str] = None):
        super().__init__(message)
        self.variable = variable


class RegularityError(SymFinslerError):
    """Raised when a metric violates a regularity (positive definiteness) requirement."""


class SingularMetricError(RegularityError):
    """Raised when 1 - p^2 is too close to zero for the surface formulas."""


class DomainError(SymFinslerError, ValueError):
    """Raised when a quantity is evaluated outside its domain of smoothness."""
