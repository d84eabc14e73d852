"""PDE model contract, weak forms and built-in problems."""

from ddfem.model.model import COEFFICIENTS, PdeModel
from ddfem.model.problems import (
    PROBLEMS,
    advection_diffusion,
    build_problem,
    get_problem,
    heat_neumann,
    list_problems,
    poisson,
    reaction3,
)
from ddfem.model.weak_form import (
    BoundaryFlux,
    DirichletConstraint,
    WeakFormResidual,
    evaluate_residual_integrand,
    mesh_boundary_terms,
    model_to_imex_form,
    model_to_weak_form,
)

__all__ = [
    "COEFFICIENTS",
    "PdeModel",
    "WeakFormResidual",
    "DirichletConstraint",
    "BoundaryFlux",
    "model_to_weak_form",
    "model_to_imex_form",
    "mesh_boundary_terms",
    "evaluate_residual_integrand",
    "PROBLEMS",
    "build_problem",
    "get_problem",
    "list_problems",
    "poisson",
    "advection_diffusion",
    "heat_neumann",
    "reaction3",
]
