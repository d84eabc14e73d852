"""PDE model contract for advection-diffusion-reaction systems."""

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Callable

from ddfem.boundary.conditions import BoundaryMap
from ddfem.errors import ModelError

COEFFICIENTS = ("F_c", "F_v", "S_i", "S_e")


@dataclass
class PdeModel:
    """
    Model of  dU/dt + div(F_c(U) - F_v(U, DU)) = S_i(U, DU) + S_e(U, DU).

    All callables are vectorised over N points: x has shape (N, d), U
    (N, m) and DU (N, m, d). Fluxes return (N, m, d) and sources (N, m).
    Missing coefficients are None and count as zero. S_i is treated
    implicitly and S_e explicitly by the time stepper; F_v implicitly and
    F_c explicitly.

    Args:
        dim_range: Number of solution components m.
        F_c: Convective flux (t, x, U).
        F_v: Viscous flux (t, x, U, DU).
        S_i: Implicit source (t, x, U, DU).
        S_e: Explicit source (t, x, U, DU).
        boundary: Boundary map, or a mapping accepted by BoundaryMap.
        out_factor_i: Scale of the outside penalty added to S_i.
        out_factor_e: Scale of the outside penalty added to S_e.
        exact: Optional exact solution (t, x) -> (N, m).
        initial: Optional initial state x -> (N, m).
        mass: Optional weight x -> (N,) of the time derivative (1 if None).
        name: Label used in logs and manifests.

    Example:
        >>> model = PdeModel(
        ...     dim_range=1,
        ...     F_v=lambda t, x, U, DU: DU,
        ...     S_i=lambda t, x, U, DU: -1.0,
        ... )
    """

    dim_range: int
    F_c: Callable | None = None
    F_v: Callable | None = None
    S_i: Callable | None = None
    S_e: Callable | None = None
    boundary: BoundaryMap | Mapping | None = field(default=None)
    out_factor_i: float | None = None
    out_factor_e: float | None = None
    exact: Callable | None = None
    initial: Callable | None = None
    mass: Callable | None = None
    name: str = "model"

    def __post_init__(self):
        if not isinstance(self.dim_range, int) or self.dim_range < 1:
            raise ModelError("dim_range must be a positive integer", {"dim_range": self.dim_range})
        if not any(getattr(self, name) is not None for name in COEFFICIENTS):
            raise ModelError(
                "A model needs at least one of F_c, F_v, S_i, S_e", {"name": self.name}
            )
        for name in COEFFICIENTS + ("exact", "initial", "mass"):
            value = getattr(self, name)
            if value is not None and not callable(value):
                raise ModelError(f"{name} must be callable", {"got": type(value).__name__})
        if not isinstance(self.boundary, BoundaryMap):
            self.boundary = BoundaryMap(self.boundary)
        for name in ("out_factor_i", "out_factor_e"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, float(value))

    def defined(self) -> list[str]:
        """Names of the coefficients this model provides."""
        return [name for name in COEFFICIENTS if getattr(self, name) is not None]

    def has(self, name: str) -> bool:
        return getattr(self, name, None) is not None
