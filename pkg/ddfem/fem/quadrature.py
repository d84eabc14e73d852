"""Quadrature rules on the reference triangle (barycentric) and segment."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Quadrature:
    """Points in barycentric (or segment) coordinates and weights summing to 1."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __len__(self) -> int:
        return len(self.weights)


def _permutations(a: float, b: float) -> list[list[float]]:
    return [[a, b, b], [b, a, b], [b, b, a]]


TRIANGLE_DEGREE2 = Quadrature(
    points=np.array(_permutations(2.0 / 3.0, 1.0 / 6.0)),
    weights=np.full(3, 1.0 / 3.0),
    degree=2,
)

_A1, _W1 = 0.445948490915965, 0.223381589678011
_A2, _W2 = 0.091576213509771, 0.109951743655322

TRIANGLE_DEGREE4 = Quadrature(
    points=np.array(
        _permutations(1.0 - 2.0 * _A1, _A1) + _permutations(1.0 - 2.0 * _A2, _A2)
    ),
    weights=np.array([_W1] * 3 + [_W2] * 3),
    degree=4,
)

# Parameter s in [0, 1] along a facet.
SEGMENT_GAUSS2 = Quadrature(
    points=0.5 + np.array([-0.5, 0.5]) / np.sqrt(3.0),
    weights=np.array([0.5, 0.5]),
    degree=3,
)


def cell_quadrature_points(cell_points: np.ndarray, rule: Quadrature) -> np.ndarray:
    """Physical quadrature points, shape (Ne, Q, 2)."""
    return np.einsum("qa,ead->eqd", rule.points, cell_points)
