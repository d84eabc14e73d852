"""PNG snapshots of sampled grid fields."""

from pathlib import Path

import numpy as np
from PIL import Image

# Blue, white, red stops of the diverging colour map.
_STOPS = np.array([[59, 76, 192], [221, 221, 221], [180, 4, 38]], dtype=float)


def colorize(values: np.ndarray, vmin: float | None = None, vmax: float | None = None) -> np.ndarray:
    """Map a 2D array to RGB bytes; NaN becomes black."""
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if not np.any(finite):
        return np.zeros(values.shape + (3,), dtype=np.uint8)
    lo = np.min(values[finite]) if vmin is None else vmin
    hi = np.max(values[finite]) if vmax is None else vmax
    scaled = np.zeros_like(values) if hi <= lo else np.clip((values - lo) / (hi - lo), 0.0, 1.0)
    position = np.where(finite, scaled, 0.0) * 2.0
    index = np.minimum(position.astype(int), 1)
    frac = (position - index)[..., None]
    rgb = _STOPS[index] * (1.0 - frac) + _STOPS[index + 1] * frac
    rgb[~finite] = 0.0
    return rgb.round().astype(np.uint8)


def save_snapshot(
    path: str | Path,
    grid_values: np.ndarray,
    vmin: float | None = None,
    vmax: float | None = None,
    scale: int = 1,
) -> Path:
    """
    Save values on a (ny + 1, nx + 1) vertex grid as a PNG, y pointing up.

    Args:
        path: Output file.
        grid_values: Array indexed [j, i].
        vmin: Lower end of the colour range (data minimum when None).
        vmax: Upper end of the colour range (data maximum when None).
        scale: Integer pixel magnification.
    """
    path = Path(path)
    img = Image.fromarray(colorize(np.flipud(grid_values), vmin, vmax))
    if scale > 1:
        img = img.resize((img.width * scale, img.height * scale), Image.Resampling.NEAREST)
    img.save(path, format="PNG")
    return path
