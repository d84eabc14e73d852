"""SDF base class: evaluation contract, phase field helpers and tree utilities."""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterator

import numpy as np

from ddfem.errors import GeometryError

if TYPE_CHECKING:
    from ddfem.geometry.operators import (
        Extrusion,
        Intersection,
        Invert,
        Revolution,
        Rotate,
        Round,
        Scale,
        Subtraction,
        Translate,
        Union,
        Xor,
    )

# Relative step of the central difference gradient fallback.
FD_STEP = 1e-6


def as_points(x) -> np.ndarray:
    """Convert x to a float array of points with shape (..., d)."""
    return np.asarray(x, dtype=float)


def sech2(z: np.ndarray) -> np.ndarray:
    """Overflow free sech(z)**2, equal to 4*phi*(1 - phi) for phi = (1 - tanh z)/2."""
    e = np.exp(-2.0 * np.abs(z))
    return 4.0 * e / (1.0 + e) ** 2


def finite_difference_gradient(fn, x: np.ndarray) -> np.ndarray:
    """Central difference gradient of a scalar point function, step 1e-6*(1+|x|)."""
    x = as_points(x)
    h = FD_STEP * (1.0 + np.linalg.norm(x, axis=-1))
    grad = np.empty(x.shape, dtype=float)
    for k in range(x.shape[-1]):
        shift = np.zeros(x.shape, dtype=float)
        shift[..., k] = h
        grad[..., k] = (fn(x + shift) - fn(x - shift)) / (2.0 * h)
    return grad


class SDF:
    """
    Base class of every signed distance function node.

    A node is negative inside its region and positive outside. Subclasses
    only have to implement ``sdf``; ``gradient`` falls back to central
    finite differences unless overridden with an analytic expression.

    Args:
        epsilon: Interface width parameter used by ``phi``.
        name: Optional name used to address the node as a boundary segment.
        children: Child nodes for operator nodes.
    """

    def __init__(
        self,
        epsilon: float | None = None,
        name: str | None = None,
        children: list[SDF] | None = None,
    ):
        self.children: list[SDF] = list(children or [])
        self.name = name
        self._epsilon: float | None = None
        if epsilon is not None:
            self.epsilon = epsilon

    # Evaluation contract -------------------------------------------------

    @property
    def dim(self) -> int | None:
        """Spatial dimension of the points this node accepts (None if any)."""
        return None

    def sdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} must implement sdf(x)")

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return finite_difference_gradient(self.sdf, x)

    def check_points(self, x) -> np.ndarray:
        """Return x as a point array, raising GeometryError on a dimension mismatch."""
        x = as_points(x)
        dim = self.dim
        if x.ndim == 0 or (dim is not None and x.shape[-1] != dim):
            raise GeometryError(
                f"Point dimension does not match {self!r}",
                {"expected": dim, "got": x.shape[-1] if x.ndim else 0},
            )
        return x

    def __call__(self, x) -> np.ndarray:
        return self.sdf(self.check_points(x))

    # Epsilon -------------------------------------------------------------

    @property
    def epsilon(self) -> float:
        if self._epsilon is None:
            raise GeometryError(
                f"epsilon is not set on {self!r}",
                {"hint": "assign node.epsilon before evaluating phi"},
            )
        return self._epsilon

    @epsilon.setter
    def epsilon(self, value: float) -> None:
        value = float(value)
        if not value > 0:
            raise GeometryError("epsilon must be positive", {"epsilon": value})
        self._epsilon = value
        for child in self.children:
            child.epsilon = value

    def fill_epsilon(self, value: float) -> None:
        """Assign epsilon to this node and its descendants that have none of their own."""
        value = float(value)
        if not value > 0:
            raise GeometryError("epsilon must be positive", {"epsilon": value})
        if self._epsilon is None:
            self._epsilon = value
        for child in self.children:
            child.fill_epsilon(value)

    @property
    def has_epsilon(self) -> bool:
        try:
            self.epsilon
        except GeometryError:
            return False
        return True

    # Phase field helpers -------------------------------------------------

    def chi(self, x) -> np.ndarray:
        return np.where(self(x) <= 0.0, 1.0, 0.0)

    def phi(self, x, epsilon: float | None = None) -> np.ndarray:
        eps = self.epsilon if epsilon is None else float(epsilon)
        if not eps > 0:
            raise GeometryError("epsilon must be positive", {"epsilon": eps})
        return 0.5 * (1.0 - np.tanh(3.0 * self(x) / eps))

    def projection(self, x) -> np.ndarray:
        x = self.check_points(x)
        return -self.sdf(x)[..., None] * self.gradient(x)

    def boundary_projection(self, x) -> np.ndarray:
        x = self.check_points(x)
        return x + self.projection(x)

    def external_projection(self, x) -> np.ndarray:
        x = self.check_points(x)
        outside = (self.sdf(x) > 0.0)[..., None]
        return np.where(outside, x + self.projection(x), x)

    # Tree utilities ------------------------------------------------------

    def walk(self) -> Iterator[SDF]:
        """Depth first pre-order traversal (shared nodes are visited once)."""
        seen: set[int] = set()
        stack: list[SDF] = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            yield node
            stack.extend(reversed(node.children))

    def search(self, name: str) -> SDF | None:
        for node in self.walk():
            if node.name == name:
                return node
        return None

    def contains(self, node: SDF) -> bool:
        return any(n is node for n in self.walk())

    def names(self) -> list[str]:
        return [n.name for n in self.walk() if n.name is not None]

    def validate_names(self) -> None:
        """Raise GeometryError when two distinct nodes share a name."""
        owners: dict[str, SDF] = {}
        for node in self.walk():
            if node.name is None:
                continue
            other = owners.setdefault(node.name, node)
            if other is not node:
                raise GeometryError("Duplicate SDF name in tree", {"name": node.name})

    # Composition ---------------------------------------------------------

    def __or__(self, other: SDF) -> Union:
        from ddfem.geometry.operators import Union

        return Union(self, other)

    def __and__(self, other: SDF) -> Intersection:
        from ddfem.geometry.operators import Intersection

        return Intersection(self, other)

    def __sub__(self, other: SDF) -> Subtraction:
        from ddfem.geometry.operators import Subtraction

        return Subtraction(self, other)

    def __xor__(self, other: SDF) -> Xor:
        from ddfem.geometry.operators import Xor

        return Xor(self, other)

    def __neg__(self) -> Invert:
        from ddfem.geometry.operators import Invert

        return Invert(self)

    __invert__ = __neg__

    def translate(self, offset, name: str | None = None) -> Translate:
        from ddfem.geometry.operators import Translate

        return Translate(self, offset, name=name)

    def rotate(self, angle: float | None = None, matrix=None, name: str | None = None) -> Rotate:
        from ddfem.geometry.operators import Rotate

        return Rotate(self, angle=angle, matrix=matrix, name=name)

    def scale(self, factor: float, name: str | None = None) -> Scale:
        from ddfem.geometry.operators import Scale

        return Scale(self, factor, name=name)

    def round(self, radius: float, name: str | None = None) -> Round:
        from ddfem.geometry.operators import Round

        return Round(self, radius, name=name)

    def extrude(self, height: float, name: str | None = None) -> Extrusion:
        from ddfem.geometry.operators import Extrusion

        return Extrusion(self, height, name=name)

    def revolve(self, name: str | None = None) -> Revolution:
        from ddfem.geometry.operators import Revolution

        return Revolution(self, name=name)

    def _repr_fields(self) -> str:
        return ""

    def __repr__(self) -> str:
        fields = self._repr_fields()
        if self.name is not None:
            fields = f"{fields}, name={self.name!r}" if fields else f"name={self.name!r}"
        return f"{type(self).__name__}({fields})"
