"""Primitive shapes with exact signed distance functions."""

import numpy as np

from ddfem.errors import GeometryError
from ddfem.geometry.base import SDF


def _signs(v: np.ndarray) -> np.ndarray:
    # sign with 0 -> +1 so ties pick a definite direction
    return np.where(v < 0.0, -1.0, 1.0)


class Ball(SDF):
    """
    Ball of a given radius around a center, r(x) = |x - c| - R.

    Example:
        >>> ball = Ball(radius=1, center=(0, 0))
        >>> float(ball((2, 0)))
        1.0
    """

    def __init__(self, radius: float, center, epsilon=None, name=None):
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)
        if not self.radius > 0:
            raise GeometryError("Ball radius must be positive", {"radius": radius})
        if self.center.ndim != 1:
            raise GeometryError("Ball center must be a point", {"center": center})
        super().__init__(epsilon=epsilon, name=name)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def sdf(self, x):
        return np.linalg.norm(x - self.center, axis=-1) - self.radius

    def gradient(self, x):
        d = x - self.center
        norm = np.linalg.norm(d, axis=-1)[..., None]
        # at the center every direction is a steepest ascent; use the first axis
        fallback = np.zeros(d.shape[-1])
        fallback[0] = 1.0
        safe = np.where(norm > 0.0, norm, 1.0)
        return np.where(norm > 0.0, d / safe, fallback)

    def _repr_fields(self) -> str:
        return f"radius={self.radius:g}, center={tuple(self.center.tolist())}"


class Box(SDF):
    """Axis aligned box given by its full edge lengths and center."""

    def __init__(self, size, center, epsilon=None, name=None):
        self.size = np.asarray(size, dtype=float)
        self.center = np.asarray(center, dtype=float)
        if self.size.shape != self.center.shape or self.size.ndim != 1:
            raise GeometryError(
                "Box size and center must have the same dimension",
                {"size": size, "center": center},
            )
        if np.any(self.size <= 0):
            raise GeometryError("Box edge lengths must be positive", {"size": size})
        super().__init__(epsilon=epsilon, name=name)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def _q(self, x):
        return np.abs(x - self.center) - 0.5 * self.size

    def sdf(self, x):
        q = self._q(x)
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside

    def gradient(self, x):
        d = x - self.center
        s = _signs(d)
        q = self._q(x)
        pos = np.maximum(q, 0.0)
        norm = np.linalg.norm(pos, axis=-1)[..., None]
        outer = s * pos / np.where(norm > 0.0, norm, 1.0)
        axis = np.argmax(q, axis=-1)
        inner = np.take_along_axis(s, axis[..., None], axis=-1) * (
            np.arange(q.shape[-1]) == axis[..., None]
        )
        return np.where(norm > 0.0, outer, inner)

    def _repr_fields(self) -> str:
        return f"size={tuple(self.size.tolist())}, center={tuple(self.center.tolist())}"


class HalfPlane(SDF):
    """Half space {x : n.x < offset} with unit normal n pointing outwards."""

    def __init__(self, normal, offset: float = 0.0, epsilon=None, name=None):
        normal = np.asarray(normal, dtype=float)
        length = np.linalg.norm(normal)
        if normal.ndim != 1 or length == 0.0:
            raise GeometryError("HalfPlane normal must be a non-zero vector", {"normal": normal})
        self.normal = normal / length
        self.offset = float(offset)
        super().__init__(epsilon=epsilon, name=name)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def sdf(self, x):
        return x @ self.normal - self.offset

    def gradient(self, x):
        return np.broadcast_to(self.normal, x.shape).copy()

    def _repr_fields(self) -> str:
        return f"normal={tuple(self.normal.tolist())}, offset={self.offset:g}"
