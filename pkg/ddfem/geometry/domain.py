"""Domain: the phase field machinery of the full domain SDF r_Omega."""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from ddfem.errors import BoundaryError, GeometryError
from ddfem.geometry.base import SDF, sech2

# |grad phi| below this is treated as zero when normalising
NORMAL_FLOOR = 1e-300


@dataclass
class PhaseFieldParams:
    """Interface parameters; the interface is roughly 2*epsilon wide."""

    epsilon: float

    def __post_init__(self):
        self.epsilon = float(self.epsilon)
        if not self.epsilon > 0:
            raise GeometryError("epsilon must be positive", {"epsilon": self.epsilon})


@dataclass
class PointData:
    """Quantities of the domain SDF at one array of points."""

    x: np.ndarray
    r: np.ndarray
    grad: np.ndarray
    phi: np.ndarray
    delta: np.ndarray  # |grad phi|

    @property
    def boundary_projection(self) -> np.ndarray:
        return self.x - self.r[..., None] * self.grad

    @property
    def external_projection(self) -> np.ndarray:
        return np.where((self.r > 0.0)[..., None], self.boundary_projection, self.x)


class Domain:
    """
    Collects the functions of the domain SDF used by the transformed integrals.

    The one-slot, thread local cache keys on the identity of the point array,
    so repeated coefficient evaluations on the same quadrature points only
    evaluate the SDF tree once.

    Args:
        omega: Root node of the domain.
        epsilon: Optional epsilon of the phase field, assigned to the whole
            tree when given.
        keep_node_epsilon: Only assign epsilon to nodes without their own,
            so segments keep their interface width.

    Example:
        >>> from ddfem.geometry import Ball
        >>> domain = Domain(Ball(radius=1, center=(0, 0)), epsilon=0.1)
        >>> float(domain.phi((0.0, 1.0)))
        0.5
    """

    def __init__(self, omega: SDF, epsilon: float | None = None, keep_node_epsilon: bool = False):
        if not isinstance(omega, SDF):
            raise GeometryError("Domain needs an SDF node", {"omega": omega})
        omega.validate_names()
        if epsilon is not None:
            if keep_node_epsilon:
                omega.fill_epsilon(epsilon)
            else:
                omega.epsilon = epsilon
        self.omega = omega
        self.params = PhaseFieldParams(omega.epsilon if epsilon is None else epsilon)
        self._local = threading.local()

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def dim(self) -> int | None:
        return self.omega.dim

    def point_data(self, x) -> PointData:
        if getattr(self._local, "key", None) is x:
            return self._local.data
        points = self.omega.check_points(x)
        r = self.omega.sdf(points)
        grad = self.omega.gradient(points)
        z = 3.0 * r / self.epsilon
        data = PointData(
            x=points,
            r=r,
            grad=grad,
            phi=0.5 * (1.0 - np.tanh(z)),
            delta=1.5 / self.epsilon * sech2(z) * np.linalg.norm(grad, axis=-1),
        )
        self._local.key = x
        self._local.data = data
        return data

    # Phase field ---------------------------------------------------------

    def sdf(self, x) -> np.ndarray:
        return self.point_data(x).r

    def chi(self, x) -> np.ndarray:
        return np.where(self.point_data(x).r <= 0.0, 1.0, 0.0)

    def phi(self, x) -> np.ndarray:
        return self.point_data(x).phi

    def scaled_normal(self, x) -> np.ndarray:
        """-grad(phi) = 3/(2 eps) sech^2(3 r / eps) grad(r)."""
        data = self.point_data(x)
        return (1.5 / self.epsilon * sech2(3.0 * data.r / self.epsilon))[..., None] * data.grad

    def surface_delta(self, x) -> np.ndarray:
        return self.point_data(x).delta

    def normal(self, x) -> np.ndarray:
        data = self.point_data(x)
        scaled = self.scaled_normal(x)
        small = (data.delta < NORMAL_FLOOR)[..., None]
        safe = np.where(small[..., 0], 1.0, data.delta)[..., None]
        return np.where(small, data.grad, scaled / safe)

    def boundary_projection(self, x) -> np.ndarray:
        return self.point_data(x).boundary_projection

    def external_projection(self, x) -> np.ndarray:
        return self.point_data(x).external_projection

    # Boundary segments ---------------------------------------------------

    def segment(self, key: SDF | str) -> SDF:
        """Resolve a segment given by node or name inside the domain tree."""
        if isinstance(key, SDF):
            if self.omega.contains(key):
                return key
            raise BoundaryError(
                f"{key!r} is not part of the domain tree", {"known": self.omega.names()}
            )
        node = self.omega.search(key)
        if node is None:
            raise BoundaryError(
                f"Unknown boundary segment '{key}'", {"known": self.omega.names()}
            )
        return node

    def segment_epsilon(self, node: SDF) -> float:
        return node.epsilon if node.has_epsilon else self.epsilon

    def segment_weight(self, key: SDF | str, x, projected: np.ndarray | None = None) -> np.ndarray:
        """
        Unnormalised weight w_i(x) = 4 phi_i(P(x)) (1 - phi_i(P(x))).

        Args:
            key: Segment node or name.
            x: Points.
            projected: Precomputed boundary projection P(x), if available.
        """
        node = self.segment(key)
        if projected is None:
            projected = self.boundary_projection(x)
        return sech2(3.0 * node.sdf(projected) / self.segment_epsilon(node))

    def bnd_proj_sdfs(self, key: SDF | str):
        """Return the unnormalised weight of a segment as a point function."""
        node = self.segment(key)
        return lambda x: self.segment_weight(node, x)
