"""Discrete P1 fields on the active vertices of a mesh."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ddfem.arrays import as_state
from ddfem.errors import MeshError
from ddfem.fem.mesh import StructuredMesh


@dataclass(eq=False)
class DiscreteField:
    """
    DOF vector of a P1 field, vertex major: dof = vertex * dim_range + component.

    Args:
        mesh: Filtered mesh the field lives on.
        values: DOF vector of length dim_range * mesh.n_vertices.
        dim_range: Number of components.
    """

    mesh: StructuredMesh
    values: np.ndarray
    dim_range: int = 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        expected = self.mesh.n_dofs(self.dim_range)
        if self.values.shape != (expected,):
            raise MeshError(
                "Field length does not match the mesh",
                {"expected": expected, "got": self.values.shape[0]},
            )

    @classmethod
    def zeros(cls, mesh: StructuredMesh, dim_range: int = 1) -> DiscreteField:
        return cls(mesh, np.zeros(mesh.n_dofs(dim_range)), dim_range)

    @classmethod
    def interpolate(cls, mesh: StructuredMesh, fn: Callable, dim_range: int = 1) -> DiscreteField:
        """Nodal interpolant of fn(x) -> (N, m) at the active vertices."""
        points = mesh.active_points()
        return cls(mesh, as_state(fn(points), len(points), dim_range), dim_range)

    def copy(self) -> DiscreteField:
        return DiscreteField(self.mesh, self.values.copy(), self.dim_range)

    def evaluate_vertices(self) -> np.ndarray:
        """Values at the active vertices, shape (n_vertices, m)."""
        return self.values.reshape(-1, self.dim_range)

    def to_vertex_array(self, fill: float = np.nan) -> np.ndarray:
        """Values on every grid vertex, inactive ones set to fill."""
        out = np.full((len(self.mesh.vertices), self.dim_range), fill)
        out[self.mesh.active_vertices] = self.evaluate_vertices()
        return out

    def cell_values(self, cells: slice | np.ndarray = slice(None)) -> np.ndarray:
        """Vertex values per active cell, shape (Ne, 3, m)."""
        return self.evaluate_vertices()[self.mesh.cell_vertices[cells]]

    def __len__(self) -> int:
        return len(self.values)
