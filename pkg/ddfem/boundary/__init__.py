"""Boundary condition wrappers and weighted boundary terms."""

from ddfem.boundary.conditions import (
    BoundaryCondition,
    BoundaryMap,
    DirichletValue,
    FluxC,
    FluxPair,
    FluxV,
    as_condition,
    is_dirichlet,
)
from ddfem.boundary.terms import BoundaryTerms, Segment

__all__ = [
    "BoundaryCondition",
    "BoundaryMap",
    "BoundaryTerms",
    "DirichletValue",
    "FluxC",
    "FluxPair",
    "FluxV",
    "Segment",
    "as_condition",
    "is_dirichlet",
]
