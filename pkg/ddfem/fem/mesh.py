"""Structured triangle meshes of a box and SDF based cell filtering."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from ddfem.errors import MeshError

logger = logging.getLogger(__name__)

# Default filter threshold in units of epsilon.
FILTER_FACTOR = 10.0


@dataclass(eq=False)
class StructuredMesh:
    """
    Uniform triangulation of a 2D box with an active cell mask.

    Vertex (i, j) has index j * (nx + 1) + i. Every quad is split along its
    diagonal into two counter clockwise triangles. Degrees of freedom live
    on the vertices of active triangles, numbered by increasing vertex
    index.
    """

    lower: np.ndarray
    upper: np.ndarray
    shape: tuple[int, int]
    vertices: np.ndarray
    triangles: np.ndarray
    active: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.active is None:
            self.active = np.ones(len(self.triangles), dtype=bool)

    @property
    def dim(self) -> int:
        return 2

    @property
    def spacing(self) -> np.ndarray:
        return (self.upper - self.lower) / np.asarray(self.shape, dtype=float)

    @property
    def h(self) -> float:
        """Largest cell edge along an axis."""
        return float(np.max(self.spacing))

    @property
    def n_cells(self) -> int:
        return int(self.active.sum())

    @cached_property
    def active_triangles(self) -> np.ndarray:
        return self.triangles[self.active]

    @cached_property
    def active_vertices(self) -> np.ndarray:
        return np.unique(self.active_triangles)

    @cached_property
    def vertex_index(self) -> np.ndarray:
        """Map from global vertex to active index (-1 if inactive)."""
        index = np.full(len(self.vertices), -1, dtype=np.int64)
        index[self.active_vertices] = np.arange(len(self.active_vertices))
        return index

    @property
    def n_vertices(self) -> int:
        return len(self.active_vertices)

    def n_dofs(self, dim_range: int) -> int:
        return self.n_vertices * dim_range

    @cached_property
    def cell_vertices(self) -> np.ndarray:
        """Active index of each active triangle's vertices, shape (Ne, 3)."""
        return self.vertex_index[self.active_triangles]

    @cached_property
    def cell_points(self) -> np.ndarray:
        """Coordinates of the active triangles, shape (Ne, 3, 2)."""
        return self.vertices[self.active_triangles]

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.cell_points
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """Gradients of the three P1 basis functions per cell, shape (Ne, 3, 2)."""
        p = self.cell_points
        jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
        inv = np.linalg.inv(jac)
        grads = np.empty((len(p), 3, 2))
        grads[:, 1:] = inv
        grads[:, 0] = -inv.sum(axis=1)
        return grads

    @cached_property
    def boundary_facets(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Facets of the active region boundary.

        Returns:
            (owner, local) where owner is the active cell of each facet and
            local the index of its first vertex; the facet runs from local
            vertex ``local`` to ``(local + 1) % 3`` counter clockwise.
        """
        tri = self.active_triangles
        edges = np.stack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]], axis=1).reshape(-1, 2)
        _, first, counts = np.unique(
            np.sort(edges, axis=1), axis=0, return_index=True, return_counts=True
        )
        boundary = np.sort(first[counts == 1])
        return boundary // 3, boundary % 3

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        """Active indices of vertices on the active region boundary."""
        owner, local = self.boundary_facets
        cv = self.cell_vertices
        ends = np.concatenate([cv[owner, local], cv[owner, (local + 1) % 3]])
        return np.unique(ends)

    def active_points(self) -> np.ndarray:
        """Coordinates of the active vertices in DOF order."""
        return self.vertices[self.active_vertices]

    def with_active(self, active: np.ndarray) -> StructuredMesh:
        return dataclasses.replace(self, active=np.asarray(active, dtype=bool))

    def is_connected(self) -> bool:
        n_cells = len(self.active_triangles)
        if n_cells == 0:
            return False
        cells = np.repeat(np.arange(n_cells), 3)
        incidence = sparse.csr_matrix(
            (np.ones(3 * n_cells), (cells, self.cell_vertices.ravel())),
            shape=(n_cells, self.n_vertices),
        )
        n_parts, _ = connected_components(incidence @ incidence.T, directed=False)
        return n_parts == 1

    def __repr__(self) -> str:
        return (
            f"StructuredMesh({self.shape[0]}x{self.shape[1]} on "
            f"{self.lower.tolist()}..{self.upper.tolist()}, "
            f"active {self.n_cells}/{len(self.triangles)})"
        )


def build_mesh(bounds, n) -> StructuredMesh:
    """
    Triangulate a box uniformly.

    Args:
        bounds: ((xmin, xmax), (ymin, ymax)).
        n: Cells per axis, an int or a pair.

    Returns:
        StructuredMesh with all cells active.

    Raises:
        MeshError: On degenerate bounds, fewer than 2 cells per axis or a
            dimension other than 2.

    Example:
        >>> mesh = build_mesh(((0, 1), (0, 1)), 2)
        >>> len(mesh.triangles), len(mesh.vertices)
        (8, 9)
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.shape != (2, 2):
        raise MeshError("Only 2D boxes ((xmin, xmax), (ymin, ymax)) are supported", {"bounds": bounds.tolist()})
    lower, upper = bounds[:, 0], bounds[:, 1]
    if np.any(lower >= upper):
        raise MeshError("Box bounds must satisfy min < max", {"bounds": bounds.tolist()})
    nx, ny = (int(n), int(n)) if np.isscalar(n) else (int(n[0]), int(n[1]))
    if nx < 2 or ny < 2:
        raise MeshError("At least 2 cells per axis are required", {"n": (nx, ny)})

    xs = np.linspace(lower[0], upper[0], nx + 1)
    ys = np.linspace(lower[1], upper[1], ny + 1)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    v00 = (j * (nx + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + nx + 1
    v11 = v01 + 1
    lower_tri = np.column_stack([v00, v10, v11])
    upper_tri = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower_tri, upper_tri], axis=1).reshape(-1, 3)
    return StructuredMesh(lower, upper, (nx, ny), vertices, triangles)


def filter_cells(
    mesh: StructuredMesh,
    sdf,
    threshold: float | None = None,
    factor: float = FILTER_FACTOR,
    check_connected: bool = True,
) -> StructuredMesh:
    """
    Deactivate cells whose every vertex lies further than threshold outside.

    Args:
        mesh: Mesh to filter; its current mask is intersected.
        sdf: SDF node or Domain (anything with ``sdf(x)``) or a callable.
        threshold: Distance cut off; defaults to factor * epsilon of sdf.
        factor: Multiple of epsilon used when threshold is None.
        check_connected: Raise MeshError if the active cells fall apart.

    Returns:
        A new mesh sharing the triangulation.
    """
    if threshold is None:
        try:
            epsilon = sdf.epsilon
        except AttributeError:
            raise MeshError("A threshold is required for SDFs without epsilon")
        threshold = factor * epsilon
    evaluate = sdf.sdf if hasattr(sdf, "sdf") else sdf
    r = np.asarray(evaluate(mesh.vertices), dtype=float)
    keep = np.any(r[mesh.triangles] <= threshold, axis=1) & mesh.active
    if not np.any(keep):
        raise MeshError("Filtering removed every cell", {"threshold": threshold})
    filtered = mesh.with_active(keep)
    logger.info(
        "Filtered mesh: %d of %d cells active (threshold %.4g)",
        filtered.n_cells,
        len(mesh.triangles),
        threshold,
    )
    if check_connected and not filtered.is_connected():
        raise MeshError(
            "Filtered mesh is not connected",
            {"threshold": threshold, "hint": "increase the filter factor or the box"},
        )
    return filtered
