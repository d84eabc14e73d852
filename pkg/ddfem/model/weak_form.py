"""Conversion of a model into a weak form residual."""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ddfem.arrays import as_flux, as_state
from ddfem.boundary.conditions import DirichletValue, FluxC, FluxPair, FluxV
from ddfem.errors import ModelError
from ddfem.model.model import PdeModel

logger = logging.getLogger(__name__)


@dataclass
class DirichletConstraint:
    """U = value(t, x) on mesh boundary vertices selected by region(x)."""

    region: Callable
    value: Callable


@dataclass
class BoundaryFlux:
    """Normal flux data on mesh boundary facets selected by region(x)."""

    region: Callable
    flux_c: Callable | None = None
    flux_v: Callable | None = None


@dataclass
class WeakFormResidual:
    """
    Residual  int flux : grad v - source . v dx + int (g_c - g_v) . v ds.

    flux and source take (t, x, U, DU). Explicit terms take the previous
    state instead of U and do not enter the Jacobian. When dt is set the
    form also carries the mass term  mass(x) (U - U_prev)/dt . v.
    """

    dim_range: int
    t: float = 0.0
    flux: Callable | None = None
    source: Callable | None = None
    constraints: list[DirichletConstraint] = field(default_factory=list)
    boundary_fluxes: list[BoundaryFlux] = field(default_factory=list)
    explicit_flux: Callable | None = None
    explicit_source: Callable | None = None
    mass: Callable | None = None
    dt: float | None = None
    name: str = "form"

    @property
    def time_dependent(self) -> bool:
        return self.dt is not None

    def volume_terms(self, t, x, U, DU, U_prev=None, DU_prev=None):
        """Return (flux, source) arrays of shape (N, m, d) and (N, m)."""
        n_points, d = x.shape
        m = self.dim_range
        flux = np.zeros((n_points, m, d))
        source = np.zeros((n_points, m))
        if self.flux is not None:
            flux += as_flux(self.flux(t, x, U, DU), n_points, m, d)
        if self.source is not None:
            source += as_state(self.source(t, x, U, DU), n_points, m)
        if U_prev is not None:
            flux_e, source_e = self.explicit_terms(t, x, U_prev, DU_prev)
            flux += flux_e
            source += source_e
        if self.dt is not None and U_prev is not None:
            weight = np.ones(n_points) if self.mass is None else np.asarray(self.mass(x), float)
            source -= np.broadcast_to(weight, (n_points,))[:, None] * (U - U_prev) / self.dt
        return flux, source

    def explicit_terms(self, t, x, U_prev, DU_prev):
        n_points, d = x.shape
        m = self.dim_range
        flux = np.zeros((n_points, m, d))
        source = np.zeros((n_points, m))
        if self.explicit_flux is not None:
            flux += as_flux(self.explicit_flux(t, x, U_prev, DU_prev), n_points, m, d)
        if self.explicit_source is not None:
            source += as_state(self.explicit_source(t, x, U_prev, DU_prev), n_points, m)
        return flux, source


def evaluate_residual_integrand(
    form: WeakFormResidual, t, x, U, DU, v, Dv, U_prev=None, DU_prev=None
) -> np.ndarray:
    """
    Pointwise value of the volume integrand.

    Args:
        form: Weak form.
        t: Time.
        x: Points (N, d).
        U, DU: State (N, m) and gradient (N, m, d).
        v, Dv: Test function values (N, m) and gradients (N, m, d).
        U_prev, DU_prev: Previous state for explicit and mass terms.

    Returns:
        Array of shape (N,).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    flux, source = form.volume_terms(t, x, U, DU, U_prev, DU_prev)
    return np.einsum("nmd,nmd->n", flux, np.asarray(Dv, float)) - np.einsum(
        "nm,nm->n", source, np.asarray(v, float)
    )


def mesh_boundary_terms(model: PdeModel) -> tuple[list[DirichletConstraint], list[BoundaryFlux]]:
    """
    Split the mesh entries of a model's boundary map.

    Raises:
        ModelError: If the map still holds Dirichlet data on diffuse segments.
    """
    boundary = model.boundary
    if boundary.has_diffuse_dirichlet:
        raise ModelError(
            f"Model '{model.name}' has Dirichlet data on diffuse boundary segments",
            {"hint": "apply a diffuse domain transformer before solving"},
        )
    if boundary.diffuse:
        logger.debug("Ignoring %d diffuse flux entries of %s", len(boundary.diffuse), model.name)
    constraints: list[DirichletConstraint] = []
    fluxes: list[BoundaryFlux] = []
    for region, condition in boundary.mesh:
        if isinstance(condition, DirichletValue):
            constraints.append(DirichletConstraint(region, condition.value))
        elif isinstance(condition, FluxPair):
            fluxes.append(BoundaryFlux(region, condition.flux_c.value, condition.flux_v.value))
        elif isinstance(condition, FluxC):
            fluxes.append(BoundaryFlux(region, flux_c=condition.value))
        elif isinstance(condition, FluxV):
            fluxes.append(BoundaryFlux(region, flux_v=condition.value))
    return constraints, fluxes


def _difference(first: Callable | None, second: Callable | None) -> Callable | None:
    """first(t, x, U, DU) - second(t, x, U)."""
    if first is None and second is None:
        return None
    if second is None:
        return first
    if first is None:
        return lambda t, x, U, DU: -np.asarray(second(t, x, U), dtype=float)
    return lambda t, x, U, DU: np.asarray(first(t, x, U, DU), float) - np.asarray(
        second(t, x, U), float
    )


def _sum(first: Callable | None, second: Callable | None) -> Callable | None:
    if first is None:
        return second
    if second is None:
        return first
    return lambda t, x, U, DU: np.asarray(first(t, x, U, DU), float) + np.asarray(
        second(t, x, U, DU), float
    )


def model_to_weak_form(model: PdeModel, t: float = 0.0) -> WeakFormResidual:
    """
    Build the stationary weak form of a model.

    Missing coefficients count as zero. Mesh boundary entries become
    constraints or facet fluxes; diffuse flux entries are ignored since a
    transformed model carries them in its sources.

    Raises:
        ModelError: If diffuse Dirichlet entries are still present.
    """
    constraints, fluxes = mesh_boundary_terms(model)
    return WeakFormResidual(
        dim_range=model.dim_range,
        t=t,
        flux=_difference(model.F_v, model.F_c),
        source=_sum(model.S_i, model.S_e),
        constraints=constraints,
        boundary_fluxes=fluxes,
        name=model.name,
    )


def model_to_imex_form(model: PdeModel, t: float, dt: float) -> WeakFormResidual:
    """
    Weak form of one semi-implicit step: F_v and S_i at the new state,
    F_c and S_e at the previous state, time derivative weighted by model.mass.
    """
    if not dt > 0:
        raise ModelError("Time step must be positive", {"dt": dt})
    constraints, fluxes = mesh_boundary_terms(model)
    F_c = model.F_c
    return WeakFormResidual(
        dim_range=model.dim_range,
        t=t,
        flux=model.F_v,
        source=model.S_i,
        constraints=constraints,
        boundary_fluxes=fluxes,
        explicit_flux=None if F_c is None else (
            lambda t, x, U, DU: -np.asarray(F_c(t, x, U), dtype=float)
        ),
        explicit_source=model.S_e,
        mass=model.mass,
        dt=float(dt),
        name=model.name,
    )
