"""Output writers: legacy VTK, CSV tables and PNG snapshots."""

from ddfem.io.snapshot import colorize, save_snapshot
from ddfem.io.tables import write_point_csv, write_table
from ddfem.io.vtk import write_field, write_structured_grid, write_unstructured_grid

__all__ = [
    "colorize",
    "save_snapshot",
    "write_point_csv",
    "write_table",
    "write_field",
    "write_structured_grid",
    "write_unstructured_grid",
]
