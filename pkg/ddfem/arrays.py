"""Shape helpers for the vectorised coefficient contract.

Points arrive as (N, d); states as (N, m); gradients and fluxes as (N, m, d).
Coefficient callables may return scalars or lower rank arrays, which are
broadcast here.
"""

import numpy as np

from ddfem.errors import ModelError, NumericalError


def as_state(value, n_points: int, m: int, *, per_point: bool | None = None) -> np.ndarray:
    """
    Broadcast a coefficient result to shape (N, m).

    A 1-D result is read per point when ``per_point`` is True and per
    component when it is False. Without the hint its length decides, and a
    length matching both readings (N == m > 1) raises ModelError.
    """
    value = np.asarray(value, dtype=float)
    if value.ndim == 1:
        if per_point is None:
            if m > 1 and value.shape[0] == n_points == m:
                raise ModelError(
                    "Coefficient result of shape (N,) is ambiguous when N equals the number of components",
                    {"shape": value.shape, "hint": "return an (N, m) or (N, 1) array"},
                )
            per_point = value.shape[0] == n_points
        if per_point:
            value = value[:, None]
    return np.broadcast_to(value, (n_points, m)).astype(float, copy=True)


def as_flux(value, n_points: int, m: int, d: int) -> np.ndarray:
    """Broadcast a flux result to shape (N, m, d)."""
    value = np.asarray(value, dtype=float)
    if value.ndim == 2 and value.shape == (n_points, d):
        value = value[:, None, :]
    return np.broadcast_to(value, (n_points, m, d)).astype(float, copy=True)


def check_finite(name: str, value: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Raise NumericalError with the first offending point if value is not finite."""
    bad = ~np.isfinite(value)
    if np.any(bad):
        axes = tuple(range(1, value.ndim))
        rows = np.any(bad, axis=axes) if axes else bad
        first = int(np.argmax(rows))
        raise NumericalError(
            f"{name} is not finite",
            {"point": np.asarray(x)[first].tolist(), "count": int(rows.sum())},
        )
    return value
