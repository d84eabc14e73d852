"""Integrals and weighted error norms of discrete fields."""

from typing import Callable

import numpy as np

from ddfem.arrays import as_state
from ddfem.errors import ConfigError
from ddfem.fem.field import DiscreteField
from ddfem.fem.quadrature import TRIANGLE_DEGREE2, TRIANGLE_DEGREE4, Quadrature, cell_quadrature_points


def _weight_function(weight, domain) -> Callable | None:
    if weight is None or callable(weight):
        return weight
    if weight in ("chi", "phi"):
        if domain is None:
            raise ConfigError(f"Weight '{weight}' needs a domain")
        return domain.chi if weight == "chi" else domain.phi
    raise ConfigError("Weight must be 'chi', 'phi', a callable or None", {"weight": weight})


def _quadrature(field: DiscreteField, rule: Quadrature):
    mesh = field.mesh
    xq = cell_quadrature_points(mesh.cell_points, rule)
    Uq = np.einsum("qa,eam->eqm", rule.points, field.cell_values())
    dx = mesh.areas[:, None] * rule.weights[None, :]
    return xq.reshape(-1, 2), Uq.reshape(-1, field.dim_range), dx.ravel()


def integrate(
    field: DiscreteField, weight=None, domain=None, rule: Quadrature = TRIANGLE_DEGREE2
) -> np.ndarray:
    """
    Integral of weight * U over the active cells, one value per component.

    With the default rule this equals the sum of the assembled mass term,
    so conserved quantities are reproduced to solver accuracy.
    """
    x, U, dx = _quadrature(field, rule)
    w = _weight_function(weight, domain)
    factor = dx if w is None else dx * np.broadcast_to(np.asarray(w(x), float), dx.shape)
    return factor @ U


def error_norm_L2(
    field: DiscreteField,
    exact: Callable,
    weight="chi",
    domain=None,
    t: float = 0.0,
    rule: Quadrature = TRIANGLE_DEGREE4,
) -> float:
    """
    sqrt( int weight |U - exact|^2 ) over the active cells.

    Args:
        field: Discrete solution.
        exact: Exact solution (t, x) -> (N, m).
        weight: "chi", "phi", a callable x -> (N,) or None.
        domain: Domain providing chi and phi.
        t: Time passed to exact.
        rule: Cell quadrature, degree 4 by default.
    """
    x, U, dx = _quadrature(field, rule)
    w = _weight_function(weight, domain)
    error = U - as_state(exact(t, x), len(x), field.dim_range)
    factor = dx if w is None else dx * np.broadcast_to(np.asarray(w(x), float), dx.shape)
    return float(np.sqrt(factor @ np.sum(error**2, axis=1)))


def dirichlet_energy(field: DiscreteField, weight=None, domain=None) -> float:
    """int weight |grad U|^2 with the degree 2 rule."""
    mesh = field.mesh
    DU = np.einsum("ead,eam->emd", mesh.basis_gradients, field.cell_values())
    density = np.sum(DU**2, axis=(1, 2))
    rule = TRIANGLE_DEGREE2
    w = _weight_function(weight, domain)
    if w is None:
        return float(mesh.areas @ density)
    xq = cell_quadrature_points(mesh.cell_points, rule).reshape(-1, 2)
    wq = np.asarray(w(xq), float).reshape(-1, len(rule)) @ rule.weights
    return float((mesh.areas * wq) @ density)
