"""
Legacy ASCII VTK writers.

Two datasets are produced: STRUCTURED_GRID for fields sampled on the scene
grid and UNSTRUCTURED_GRID (triangles) for solutions on filtered meshes.
"""

import logging
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

VTK_TRIANGLE = 5
FLOAT_FORMAT = "%.17g"


def _pad(points: np.ndarray) -> np.ndarray:
    """VTK requires 3D points; 2D input gets a zero third component."""
    points = np.asarray(points, dtype=float)
    if points.shape[1] == 3:
        return points
    return np.pad(points, ((0, 0), (0, 3 - points.shape[1])), "constant")


def _clean_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "_-." else "_" for c in name)


def _write_header(f, title: str, dataset: str) -> None:
    f.write("# vtk DataFile Version 3.0\n")
    f.write(f"{title.splitlines()[0] if title else 'ddfem'}\n")
    f.write("ASCII\n")
    f.write(f"DATASET {dataset}\n")


def _write_points(f, points: np.ndarray) -> None:
    points = _pad(points)
    f.write(f"POINTS {len(points)} double\n")
    np.savetxt(f, points, fmt=FLOAT_FORMAT)


def _write_data(f, section: str, n: int, data: dict[str, np.ndarray]) -> None:
    if not data:
        return
    f.write(f"{section} {n}\n")
    for name, values in data.items():
        values = np.asarray(values, dtype=float).reshape(n, -1)
        components = values.shape[1]
        if components > 4:
            # split wide fields, VTK scalars hold at most 4 components
            for i in range(components):
                _write_data_array(f, f"{name}_{i}", values[:, i : i + 1])
        else:
            _write_data_array(f, name, values)


def _write_data_array(f, name: str, values: np.ndarray) -> None:
    f.write(f"SCALARS {_clean_name(name)} double {values.shape[1]}\n")
    f.write("LOOKUP_TABLE default\n")
    np.savetxt(f, values, fmt=FLOAT_FORMAT)


def write_structured_grid(
    path: str | Path,
    shape: tuple[int, int],
    points: np.ndarray,
    point_data: dict[str, np.ndarray],
    title: str = "ddfem sampled field",
) -> Path:
    """
    Write fields sampled on a (nx + 1) x (ny + 1) vertex grid.

    Args:
        path: Output file.
        shape: Number of cells (nx, ny); points are x fastest.
        points: Grid points, shape ((nx + 1) * (ny + 1), 2).
        point_data: Field name to values per point.
        title: Single line title.
    """
    path = Path(path)
    nx, ny = shape
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        _write_header(f, title, "STRUCTURED_GRID")
        f.write(f"DIMENSIONS {nx + 1} {ny + 1} 1\n")
        _write_points(f, points)
        _write_data(f, "POINT_DATA", len(points), point_data)
    logger.debug("Wrote %s", path)
    return path


def write_unstructured_grid(
    path: str | Path,
    points: np.ndarray,
    triangles: np.ndarray,
    point_data: dict[str, np.ndarray] | None = None,
    cell_data: dict[str, np.ndarray] | None = None,
    title: str = "ddfem solution",
) -> Path:
    """Write a triangle mesh with point and cell data."""
    path = Path(path)
    triangles = np.asarray(triangles, dtype=np.int64)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        _write_header(f, title, "UNSTRUCTURED_GRID")
        _write_points(f, points)
        f.write(f"CELLS {len(triangles)} {4 * len(triangles)}\n")
        cells = np.column_stack([np.full(len(triangles), 3), triangles])
        np.savetxt(f, cells, fmt="%d")
        f.write(f"CELL_TYPES {len(triangles)}\n")
        np.savetxt(f, np.full(len(triangles), VTK_TRIANGLE), fmt="%d")
        _write_data(f, "POINT_DATA", len(points), point_data or {})
        _write_data(f, "CELL_DATA", len(triangles), cell_data or {})
    logger.debug("Wrote %s", path)
    return path


def write_field(path: str | Path, field, name: str = "U", extra: dict | None = None) -> Path:
    """Write a DiscreteField on its active cells."""
    mesh = field.mesh
    data = {name: field.evaluate_vertices()}
    data.update(extra or {})
    return write_unstructured_grid(path, mesh.active_points(), mesh.cell_vertices, data)
