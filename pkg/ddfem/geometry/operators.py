"""Boolean, affine and shape operators combining SDF nodes."""

import numpy as np

from ddfem.errors import GeometryError
from ddfem.geometry.base import SDF, finite_difference_gradient


class BaseOperator(SDF):
    """
    Operator node. When its own epsilon is unset it reports the maximum
    epsilon of its children.
    """

    def __init__(self, children: list[SDF], epsilon=None, name=None):
        for child in children:
            if not isinstance(child, SDF):
                raise GeometryError("Operator children must be SDF nodes", {"child": child})
        super().__init__(epsilon=epsilon, name=name, children=children)

    @property
    def dim(self) -> int | None:
        dims = {c.dim for c in self.children if c.dim is not None}
        if len(dims) > 1:
            raise GeometryError("Children have different dimensions", {"dims": sorted(dims)})
        return dims.pop() if dims else None

    @property
    def epsilon(self) -> float:
        if self._epsilon is not None:
            return self._epsilon
        values = [c.epsilon for c in self.children if c.has_epsilon]
        if not values:
            raise GeometryError(
                f"epsilon is not set on {self!r} or any of its children",
                {"hint": "assign node.epsilon before evaluating phi"},
            )
        return max(values)

    @epsilon.setter
    def epsilon(self, value: float) -> None:
        SDF.epsilon.fset(self, value)

    @property
    def child(self) -> SDF:
        return self.children[0]

    def _repr_fields(self) -> str:
        return ", ".join(repr(c) for c in self.children)


class Union(BaseOperator):
    def __init__(self, sdf1: SDF, sdf2: SDF, epsilon=None, name=None):
        super().__init__([sdf1, sdf2], epsilon=epsilon, name=name)

    def sdf(self, x):
        return np.minimum(self.children[0].sdf(x), self.children[1].sdf(x))

    def gradient(self, x):
        a, b = self.children
        first = (a.sdf(x) <= b.sdf(x))[..., None]
        return np.where(first, a.gradient(x), b.gradient(x))


class Intersection(BaseOperator):
    def __init__(self, sdf1: SDF, sdf2: SDF, epsilon=None, name=None):
        super().__init__([sdf1, sdf2], epsilon=epsilon, name=name)

    def sdf(self, x):
        return np.maximum(self.children[0].sdf(x), self.children[1].sdf(x))

    def gradient(self, x):
        a, b = self.children
        first = (a.sdf(x) >= b.sdf(x))[..., None]
        return np.where(first, a.gradient(x), b.gradient(x))


class Subtraction(BaseOperator):
    """Points of the first node that are not in the second: max(a, -b)."""

    def __init__(self, sdf1: SDF, sdf2: SDF, epsilon=None, name=None):
        super().__init__([sdf1, sdf2], epsilon=epsilon, name=name)

    def sdf(self, x):
        return np.maximum(self.children[0].sdf(x), -self.children[1].sdf(x))

    def gradient(self, x):
        a, b = self.children
        first = (a.sdf(x) >= -b.sdf(x))[..., None]
        return np.where(first, a.gradient(x), -b.gradient(x))


class Xor(BaseOperator):
    """Symmetric difference: max(min(a, b), -max(a, b))."""

    def __init__(self, sdf1: SDF, sdf2: SDF, epsilon=None, name=None):
        super().__init__([sdf1, sdf2], epsilon=epsilon, name=name)

    def sdf(self, x):
        a = self.children[0].sdf(x)
        b = self.children[1].sdf(x)
        return np.maximum(np.minimum(a, b), -np.maximum(a, b))

    def gradient(self, x):
        sa, sb = self.children
        a, b = sa.sdf(x), sb.sdf(x)
        ga, gb = sa.gradient(x), sb.gradient(x)
        low = np.minimum(a, b)
        high = -np.maximum(a, b)
        g_low = np.where((a <= b)[..., None], ga, gb)
        g_high = -np.where((a >= b)[..., None], ga, gb)
        return np.where((low >= high)[..., None], g_low, g_high)


class Invert(BaseOperator):
    def __init__(self, sdf: SDF, epsilon=None, name=None):
        super().__init__([sdf], epsilon=epsilon, name=name)

    def sdf(self, x):
        return -self.child.sdf(x)

    def gradient(self, x):
        return -self.child.gradient(x)


class Translate(BaseOperator):
    def __init__(self, sdf: SDF, offset, epsilon=None, name=None):
        self.offset = np.asarray(offset, dtype=float)
        super().__init__([sdf], epsilon=epsilon, name=name)
        if self.child.dim is not None and self.offset.shape != (self.child.dim,):
            raise GeometryError(
                "Translation offset does not match child dimension",
                {"offset": offset, "dim": self.child.dim},
            )

    @property
    def dim(self) -> int:
        return self.offset.shape[0]

    def sdf(self, x):
        return self.child.sdf(x - self.offset)

    def gradient(self, x):
        return self.child.gradient(x - self.offset)


class Rotate(BaseOperator):
    """
    Rigid rotation of a child node.

    Args:
        sdf: Node to rotate.
        angle: Counter clockwise angle in radians (2D).
        matrix: Orthogonal rotation matrix (any dimension), used instead of angle.
    """

    def __init__(self, sdf: SDF, angle: float | None = None, matrix=None, epsilon=None, name=None):
        if matrix is None:
            if angle is None:
                raise GeometryError("Rotate needs an angle or a matrix")
            c, s = np.cos(angle), np.sin(angle)
            matrix = [[c, -s], [s, c]]
        self.angle = angle
        self.matrix = np.asarray(matrix, dtype=float)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or not np.allclose(
            self.matrix @ self.matrix.T, np.eye(n), atol=1e-12
        ):
            raise GeometryError("Rotation matrix must be orthogonal", {"matrix": matrix})
        super().__init__([sdf], epsilon=epsilon, name=name)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def sdf(self, x):
        # row vector form of R^T x
        return self.child.sdf(x @ self.matrix)

    def gradient(self, x):
        return self.child.gradient(x @ self.matrix) @ self.matrix.T


class Scale(BaseOperator):
    """Uniform scaling s * child(x / s), which keeps the distance property."""

    def __init__(self, sdf: SDF, factor: float, epsilon=None, name=None):
        self.factor = float(factor)
        if not self.factor > 0:
            raise GeometryError("Scale factor must be positive", {"factor": factor})
        super().__init__([sdf], epsilon=epsilon, name=name)

    def sdf(self, x):
        return self.factor * self.child.sdf(x / self.factor)

    def gradient(self, x):
        return self.child.gradient(x / self.factor)


class Round(BaseOperator):
    def __init__(self, sdf: SDF, radius: float, epsilon=None, name=None):
        self.radius = float(radius)
        super().__init__([sdf], epsilon=epsilon, name=name)

    def sdf(self, x):
        return self.child.sdf(x) - self.radius

    def gradient(self, x):
        return self.child.gradient(x)


class Extrusion(BaseOperator):
    """
    Extrude a 2D node along z over a total height centred at z = 0.
    """

    def __init__(self, sdf: SDF, height: float, epsilon=None, name=None):
        self.height = float(height)
        if not self.height > 0:
            raise GeometryError("Extrusion height must be positive", {"height": height})
        super().__init__([sdf], epsilon=epsilon, name=name)
        if self.child.dim not in (None, 2):
            raise GeometryError("Extrusion needs a 2D child", {"dim": self.child.dim})

    @property
    def dim(self) -> int:
        return 3

    def _parts(self, x):
        d = self.child.sdf(x[..., :2])
        w = np.abs(x[..., 2]) - 0.5 * self.height
        return d, w

    def sdf(self, x):
        d, w = self._parts(x)
        outside = np.hypot(np.maximum(d, 0.0), np.maximum(w, 0.0))
        return outside + np.minimum(np.maximum(d, w), 0.0)

    def gradient(self, x):
        d, w = self._parts(x)
        gd = self.child.gradient(x[..., :2])
        z = x[..., 2]
        sz = np.where(z < 0.0, -1.0, 1.0)
        zero = np.zeros_like(d)
        corner = (d > 0.0) & (w > 0.0)
        q = np.where(corner, np.hypot(d, w), 1.0)
        lateral = d >= w
        g = np.empty(x.shape, dtype=float)
        g[..., :2] = np.where(
            corner[..., None],
            gd * (d / q)[..., None],
            np.where(lateral[..., None], gd, 0.0),
        )
        g[..., 2] = np.where(corner, sz * w / q, np.where(lateral, zero, sz))
        ambiguous = ~corner & ~lateral & (z == 0.0)
        if np.any(ambiguous):
            g[ambiguous] = finite_difference_gradient(self.sdf, x[ambiguous])
        return g


class Revolution(BaseOperator):
    """
    Revolve a 2D profile around the z axis: child(|x_xy|, x_z).
    """

    def __init__(self, sdf: SDF, epsilon=None, name=None):
        super().__init__([sdf], epsilon=epsilon, name=name)
        if self.child.dim not in (None, 2):
            raise GeometryError("Revolution needs a 2D profile", {"dim": self.child.dim})

    @property
    def dim(self) -> int:
        return 3

    @staticmethod
    def _profile(x):
        return np.stack([np.hypot(x[..., 0], x[..., 1]), x[..., 2]], axis=-1)

    def sdf(self, x):
        return self.child.sdf(self._profile(x))

    def gradient(self, x):
        q = self._profile(x)
        gq = self.child.gradient(q)
        rho = q[..., 0]
        on_axis = rho == 0.0
        safe = np.where(on_axis, 1.0, rho)
        g = np.stack(
            [gq[..., 0] * x[..., 0] / safe, gq[..., 0] * x[..., 1] / safe, gq[..., 1]],
            axis=-1,
        )
        if np.any(on_axis):
            g[on_axis] = finite_difference_gradient(self.sdf, x[on_axis])
        return g
