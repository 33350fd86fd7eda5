"""
Deterministic direction samples on the unit circle and unit sphere.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_DIRECTIONS_2D = 720
DEFAULT_DIRECTIONS_3D = 2000

_SPECIAL_2D = [
    (1, 0), (0, 1),
    (1, 1), (1, -1),
    (1, 2), (1, -2), (2, 1), (2, -1),
]


def _special_3d() -> List[Tuple[int, int, int]]:
    axes = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    faces = [(1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1)]
    bodies = [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)]
    return axes + faces + bodies


def _normalized(vectors) -> np.ndarray:
    array = np.asarray(vectors, dtype=float)
    return array / np.linalg.norm(array, axis=-1, keepdims=True)


def fibonacci_sphere(count: int) -> np.ndarray:
    """Fibonacci lattice of count points on the unit sphere, shape (count, 3)."""
    offset = 2.0 / count
    increment = math.pi * (3.0 - math.sqrt(5.0))
    i = np.arange(count)
    y = i * offset - 1.0 + offset / 2.0
    r = np.sqrt(1.0 - y * y)
    phi = ((i + 1) % count) * increment
    return np.column_stack([np.cos(phi) * r, y, np.sin(phi) * r])


def uniform_circle(count: int) -> np.ndarray:
    """count equally spaced angles on the unit circle, shape (count, 2)."""
    angles = np.arange(count) * (2.0 * math.pi / count)
    return np.column_stack([np.cos(angles), np.sin(angles)])


@dataclass(frozen=True)
class DirectionSampler:
    """
    Unit directions used to test "for all nonzero y" statements by sampling.

    Attributes:
        dimension: 2 or 3
        count: Number of lattice directions (special directions are added on top)
    """

    dimension: int = 2
    count: int = DEFAULT_DIRECTIONS_2D

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise InvalidInputError(f"Direction sampling supports dimensions 2 and 3, got {self.dimension}")
        if self.count < 1:
            raise InvalidInputError(f"Direction count must be positive, got {self.count}")

    @classmethod
    def for_dimension(cls, dimension: int, count: int = None) -> 'DirectionSampler':
        if count is None:
            count = DEFAULT_DIRECTIONS_2D if dimension == 2 else DEFAULT_DIRECTIONS_3D
        return cls(dimension, count)

    @property
    def scheme(self) -> str:
        return 'uniform-angle' if self.dimension == 2 else 'fibonacci-lattice'

    def special_directions(self) -> np.ndarray:
        """Axes and low-denominator diagonals, normalized."""
        return _normalized(_SPECIAL_2D if self.dimension == 2 else _special_3d())

    def directions(self) -> np.ndarray:
        """Special directions followed by the lattice, shape (N, dimension)."""
        lattice = uniform_circle(self.count) if self.dimension == 2 else fibonacci_sphere(self.count)
        return np.vstack([self.special_directions(), lattice])

    def __len__(self) -> int:
        return len(self.special_directions()) + self.count

    def to_dict(self):
        return {'dimension': self.dimension, 'count': self.count, 'scheme': self.scheme, 'total': len(self)}
