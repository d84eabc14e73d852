"""Boundary condition wrappers and the boundary map."""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any, Callable

from ddfem.errors import BoundaryError
from ddfem.geometry.base import SDF


@dataclass(frozen=True)
class DirichletValue:
    """Dirichlet data g(t, x) -> (N, m)."""

    value: Callable

    def __call__(self, t, x):
        return self.value(t, x)


@dataclass(frozen=True)
class FluxC:
    """Convective normal flux g_c(t, x, U, n) -> (N, m)."""

    value: Callable

    def __call__(self, t, x, U, n):
        return self.value(t, x, U, n)


@dataclass(frozen=True)
class FluxV:
    """Viscous normal flux g_v(t, x, U, DU, n) -> (N, m)."""

    value: Callable

    def __call__(self, t, x, U, DU, n):
        return self.value(t, x, U, DU, n)


@dataclass(frozen=True)
class FluxPair:
    """Both fluxes, required when the model has F_c and F_v."""

    flux_c: FluxC
    flux_v: FluxV

    def __post_init__(self):
        if not isinstance(self.flux_c, FluxC):
            object.__setattr__(self, "flux_c", FluxC(self.flux_c))
        if not isinstance(self.flux_v, FluxV):
            object.__setattr__(self, "flux_v", FluxV(self.flux_v))


BoundaryCondition = DirichletValue | FluxC | FluxV | FluxPair


def as_condition(value: Any) -> BoundaryCondition:
    """
    Normalise a boundary map value to one of the wrappers.

    A two element list or tuple ``[FluxC, FluxV]`` becomes a FluxPair. Bare
    callables are rejected since their type cannot be told apart.
    """
    if isinstance(value, (DirichletValue, FluxC, FluxV, FluxPair)):
        return value
    if isinstance(value, (list, tuple)) and len(value) == 2:
        first, second = value
        if isinstance(first, FluxV) and isinstance(second, FluxC):
            first, second = second, first
        if isinstance(first, FluxC) and isinstance(second, FluxV):
            return FluxPair(first, second)
    raise BoundaryError(
        "Boundary values must be DirichletValue, FluxC, FluxV or FluxPair",
        {"value": value},
    )


def is_dirichlet(condition: BoundaryCondition) -> bool:
    return isinstance(condition, DirichletValue)


class BoundaryMap:
    """
    Ordered boundary entries split into diffuse and mesh parts.

    Keys may be SDF nodes or node names (diffuse segments of the domain
    boundary) or predicates ``x -> bool array`` selecting facets of the
    computational mesh boundary. SDF nodes are callable too, so they are
    recognised before predicates.

    Args:
        entries: Mapping or iterable of (key, condition) pairs.
    """

    def __init__(self, entries: Mapping | Iterable[tuple[Any, Any]] | None = None):
        self.diffuse: list[tuple[SDF | str, BoundaryCondition]] = []
        self.mesh: list[tuple[Callable, BoundaryCondition]] = []
        if entries is None:
            return
        items = entries.items() if isinstance(entries, Mapping) else entries
        for key, value in items:
            self.add(key, value)

    def add(self, key, value) -> None:
        condition = as_condition(value)
        if isinstance(key, (SDF, str)):
            self.diffuse.append((key, condition))
        elif callable(key):
            self.mesh.append((key, condition))
        else:
            raise BoundaryError(
                "Boundary keys must be SDF nodes, names or predicates", {"key": key}
            )

    @property
    def has_diffuse_dirichlet(self) -> bool:
        return any(is_dirichlet(c) for _, c in self.diffuse)

    def __len__(self) -> int:
        return len(self.diffuse) + len(self.mesh)

    def __iter__(self):
        yield from self.diffuse
        yield from self.mesh

    def __repr__(self) -> str:
        keys = [k if isinstance(k, str) else repr(k) for k, _ in self.diffuse]
        return f"BoundaryMap(diffuse={keys}, mesh={len(self.mesh)})"
