"""CSV tables with fixed float formatting."""

from pathlib import Path
from typing import Sequence

import numpy as np

FLOAT_FORMAT = "%.17g"


def write_point_csv(
    path: str | Path, points: np.ndarray, columns: dict[str, np.ndarray]
) -> Path:
    """Write rows (x, y, field...) with 17 significant digits."""
    path = Path(path)
    points = np.asarray(points, dtype=float)
    names = ["x", "y", "z"][: points.shape[1]]
    blocks = [points]
    for name, values in columns.items():
        values = np.asarray(values, dtype=float).reshape(len(points), -1)
        if values.shape[1] == 1:
            names.append(name)
        else:
            names.extend(f"{name}_{i}" for i in range(values.shape[1]))
        blocks.append(values)
    np.savetxt(
        path,
        np.hstack(blocks),
        fmt=FLOAT_FORMAT,
        delimiter=",",
        header=",".join(names),
        comments="",
    )
    return path


def write_table(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    """Write a small table; floats use 17 significant digits."""
    path = Path(path)

    def cell(value) -> str:
        if isinstance(value, (float, np.floating)):
            return FLOAT_FORMAT % value
        return str(value)

    lines = [",".join(header)] + [",".join(cell(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
