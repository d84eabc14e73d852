"""Common first pass of every diffuse domain transformation."""

import dataclasses
import logging
from typing import Callable

import numpy as np

from ddfem.boundary.conditions import BoundaryMap, DirichletValue, FluxC, FluxPair, FluxV
from ddfem.boundary.terms import BoundaryTerms
from ddfem.errors import TransformError
from ddfem.geometry.domain import Domain
from ddfem.model.model import PdeModel

logger = logging.getLogger(__name__)


def zero_if_none(value, U) -> np.ndarray:
    return np.zeros_like(U, dtype=float) if value is None else value


def _extend(fn: Callable | None, domain: Domain) -> Callable | None:
    """Evaluate fn at the external projection of x (identity inside the domain)."""
    if fn is None:
        return None

    def extended(t, x, *args):
        return fn(t, domain.external_projection(x), *args)

    return extended


def outside_region(domain: Domain) -> Callable:
    """Mesh boundary selector {x : chi(x) < 0.5}."""
    return lambda x: domain.chi(x) < 0.5


def default_mesh_condition(model: PdeModel, bt: BoundaryTerms):
    """
    Condition on the outer boundary of the computational box.

    Dirichlet with G_V when any diffuse Dirichlet segment exists, otherwise
    the flux pair (-G_{F_c}, G_{F_v}) restricted to the fluxes the model has.
    """
    if bt.has_dirichlet:
        return DirichletValue(lambda t, x: bt.bnd_value_ext(t, x))

    def flux_c(t, x, U, n):
        return -zero_if_none(bt.bnd_flux_c_ext(t, x, U), U)

    def flux_v(t, x, U, DU, n):
        return zero_if_none(bt.bnd_flux_v_ext(t, x, U, DU), U)

    has_c = model.F_c is not None
    has_v = model.F_v is not None
    if has_c and has_v:
        return FluxPair(FluxC(flux_c), FluxV(flux_v))
    if has_c:
        return FluxC(flux_c)
    if has_v:
        return FluxV(flux_v)
    return None


def pretransform(model: PdeModel, domain: Domain) -> tuple[PdeModel, BoundaryTerms]:
    """
    Prepare a model for a diffuse domain transformation.

    Builds the boundary terms, extends every coefficient by composing it
    with the external projection, and replaces the diffuse boundary entries
    by the default condition on the outer mesh boundary. Mesh entries of
    the original map are kept and take precedence.

    Args:
        model: Original model posed on the domain.
        domain: Phase field domain.

    Returns:
        The extended model and its BoundaryTerms.

    Raises:
        TransformError: If Dirichlet segments exist but neither out factor is set.
    """
    bt = BoundaryTerms(model, domain)
    if bt.has_dirichlet and model.out_factor_i is None and model.out_factor_e is None:
        raise TransformError(
            "Dirichlet boundary segments need out_factor_i or out_factor_e. "
            "At least one is required to scale the outside penalty",
            {"model": model.name, "segments": [bt.labels[i] for i in bt.dirichlet_index]},
        )
    boundary = BoundaryMap(bt.physical)
    default = default_mesh_condition(model, bt)
    if default is not None:
        boundary.add(outside_region(domain), default)
    extended = dataclasses.replace(
        model,
        F_c=_extend(model.F_c, domain),
        F_v=_extend(model.F_v, domain),
        S_i=_extend(model.S_i, domain),
        S_e=_extend(model.S_e, domain),
        boundary=boundary,
    )
    logger.debug("Pretransformed %s: %r", model.name, bt)
    return extended, bt
