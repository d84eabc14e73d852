"""P1 assembly of weak form residuals with finite difference Jacobians."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import sparse

from ddfem.arrays import as_state, check_finite
from ddfem.fem.field import DiscreteField
from ddfem.fem.mesh import StructuredMesh
from ddfem.fem.parallel import chunked_map
from ddfem.fem.quadrature import (
    SEGMENT_GAUSS2,
    TRIANGLE_DEGREE2,
    Quadrature,
    cell_quadrature_points,
)
from ddfem.model.weak_form import WeakFormResidual

logger = logging.getLogger(__name__)

# Relative step of the element Jacobian: h = JACOBIAN_STEP * (1 + |U|).
JACOBIAN_STEP = 1e-7


@dataclass
class Assembly:
    """
    Assembled system.

    Attributes:
        matrix: Jacobian with Dirichlet rows and columns replaced by identity
            (None when only the residual was requested).
        residual: Residual with constrained entries U - g.
        rhs: Right-hand side of the Newton correction, matrix @ dU = rhs.
        constrained: Constrained DOF indices.
        constraint_values: Their prescribed values.
    """

    matrix: sparse.csr_matrix | None
    residual: np.ndarray
    rhs: np.ndarray | None
    constrained: np.ndarray
    constraint_values: np.ndarray

    def __iter__(self):
        yield self.matrix
        yield self.residual


def _local_dofs(vertices: np.ndarray, m: int) -> np.ndarray:
    """Vertex major DOF indices, shape (n, 3 m)."""
    return (vertices[:, :, None] * m + np.arange(m)).reshape(len(vertices), -1)


def _differentiate(residual: Callable, Ue: np.ndarray, jacobian: bool):
    """Residual of each cell and its central difference Jacobian in the local DOFs."""
    n, n_local, m = Ue.shape
    R0 = residual(Ue).reshape(n, -1)
    if not jacobian:
        return (R0,)
    flat = Ue.reshape(n, -1)
    K = np.empty((n, R0.shape[1], flat.shape[1]))
    for k in range(flat.shape[1]):
        h = JACOBIAN_STEP * (1.0 + np.abs(flat[:, k]))
        up = flat.copy()
        down = flat.copy()
        up[:, k] += h
        down[:, k] -= h
        Rp = residual(up.reshape(Ue.shape)).reshape(n, -1)
        Rm = residual(down.reshape(Ue.shape)).reshape(n, -1)
        K[:, :, k] = (Rp - Rm) / (2.0 * h[:, None])
    return R0, K


def _cell_terms(form, mesh, t, Uv, Upv, rule, jacobian):
    m = form.dim_range
    lam = rule.points
    n_q = len(rule)

    def chunk(start: int, stop: int):
        cells = slice(start, stop)
        xq = cell_quadrature_points(mesh.cell_points[cells], rule).reshape(-1, 2)
        grads = mesh.basis_gradients[cells]
        weights = mesh.areas[cells][:, None] * rule.weights[None, :]
        cv = mesh.cell_vertices[cells]

        def at_points(Ue):
            Uq = np.einsum("qa,eam->eqm", lam, Ue).reshape(-1, m)
            DUq = np.repeat(np.einsum("ead,eam->emd", grads, Ue), n_q, axis=0)
            return Uq, DUq

        explicit = None
        mass_term = None
        if Upv is not None:
            Up_q, DUp_q = at_points(Upv[cv])
            explicit = form.explicit_terms(t, xq, Up_q, DUp_q)
            if form.dt is not None:
                weight = np.ones(len(xq)) if form.mass is None else form.mass(xq)
                weight = np.broadcast_to(np.asarray(weight, float), (len(xq),))
                mass_term = (weight[:, None] / form.dt, Up_q)

        def residual(Ue):
            Uq, DUq = at_points(Ue)
            flux, source = form.volume_terms(t, xq, Uq, DUq)
            if explicit is not None:
                flux = flux + explicit[0]
                source = source + explicit[1]
            if mass_term is not None:
                source = source - mass_term[0] * (Uq - mass_term[1])
            check_finite(f"{form.name} flux", flux, xq)
            check_finite(f"{form.name} source", source, xq)
            flux = flux.reshape(len(Ue), n_q, m, -1)
            source = source.reshape(len(Ue), n_q, m)
            return np.einsum("eq,eqmd,ead->eam", weights, flux, grads) - np.einsum(
                "eq,eqm,qa->eam", weights, source, lam
            )

        return _differentiate(residual, Uv[cv], jacobian)

    return chunk


def _facet_terms(form, mesh, t, Uv, facets, flux_entry, jacobian):
    """Residual of  int (g_c - g_v) . v ds  on the given boundary facets."""
    m = form.dim_range
    owner_all, local_all = mesh.boundary_facets
    owner = owner_all[facets]
    a = local_all[facets]
    b = (a + 1) % 3
    s = SEGMENT_GAUSS2.points
    n_g = len(s)
    rows = np.arange(len(owner))
    lam = np.zeros((len(owner), n_g, 3))
    lam[rows, :, a] = 1.0 - s
    lam[rows, :, b] = s
    pa = mesh.cell_points[owner, a]
    pb = mesh.cell_points[owner, b]
    tangent = pb - pa
    length = np.linalg.norm(tangent, axis=1)
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / length[:, None]
    xf = (pa[:, None, :] * (1.0 - s)[None, :, None] + pb[:, None, :] * s[None, :, None]).reshape(-1, 2)
    nf = np.repeat(normal, n_g, axis=0)
    weights = length[:, None] * SEGMENT_GAUSS2.weights[None, :]
    grads = mesh.basis_gradients[owner]

    def residual(Ue):
        Uq = np.einsum("fga,fam->fgm", lam, Ue).reshape(-1, m)
        DUq = np.repeat(np.einsum("fad,fam->fmd", grads, Ue), n_g, axis=0)
        g = np.zeros((len(xf), m))
        if flux_entry.flux_c is not None:
            g += as_state(flux_entry.flux_c(t, xf, Uq, nf), len(xf), m)
        if flux_entry.flux_v is not None:
            g -= as_state(flux_entry.flux_v(t, xf, Uq, DUq, nf), len(xf), m)
        check_finite(f"{form.name} boundary flux", g, xf)
        return np.einsum("fg,fgm,fga->fam", weights, g.reshape(len(Ue), n_g, m), lam)

    terms = _differentiate(residual, Uv[mesh.cell_vertices[owner]], jacobian)
    return mesh.cell_vertices[owner], terms


def _constraints(form: WeakFormResidual, mesh: StructuredMesh, t: float):
    m = form.dim_range
    if not form.constraints:
        return np.empty(0, dtype=np.int64), np.empty(0)
    vertices = mesh.boundary_vertices
    coords = mesh.active_points()[vertices]
    assigned = np.full(len(vertices), -1)
    for idx, constraint in enumerate(form.constraints):
        hit = np.asarray(constraint.region(coords), dtype=bool) & (assigned < 0)
        assigned[hit] = idx
    dofs, values = [], []
    for idx, constraint in enumerate(form.constraints):
        hit = assigned == idx
        if not np.any(hit):
            continue
        value = as_state(constraint.value(t, coords[hit]), int(hit.sum()), m)
        check_finite(f"{form.name} Dirichlet value", value, coords[hit])
        dofs.append((vertices[hit][:, None] * m + np.arange(m)).ravel())
        values.append(value.ravel())
    if not dofs:
        return np.empty(0, dtype=np.int64), np.empty(0)
    dofs = np.concatenate(dofs)
    order = np.argsort(dofs)
    return dofs[order], np.concatenate(values)[order]


def assemble(
    form: WeakFormResidual,
    mesh: StructuredMesh,
    U: DiscreteField | np.ndarray | None = None,
    t: float | None = None,
    U_prev: DiscreteField | np.ndarray | None = None,
    jacobian: bool = True,
    threads: int | None = None,
    rule: Quadrature = TRIANGLE_DEGREE2,
) -> Assembly:
    """
    Assemble residual and Jacobian of a weak form on the active cells.

    The Jacobian is built from central differences of each cell residual in
    the cell's local DOFs. Dirichlet constraints replace their rows by the
    identity (residual U - g) and are lifted out of the free rows, so a
    self-adjoint form yields a symmetric matrix.

    Args:
        form: Weak form residual.
        mesh: Filtered mesh.
        U: Linearisation state (zero when None).
        t: Time, form.t when None.
        U_prev: Previous state for explicit and mass terms.
        jacobian: Also assemble the Jacobian.
        threads: Worker threads for the cell loop.
        rule: Cell quadrature.

    Returns:
        Assembly, which unpacks to (matrix, residual).

    Raises:
        NumericalError: If a coefficient is not finite at some point.
    """
    m = form.dim_range
    n_dofs = mesh.n_dofs(m)
    t = form.t if t is None else float(t)
    values = np.zeros(n_dofs) if U is None else np.asarray(getattr(U, "values", U), dtype=float)
    Uv = values.reshape(-1, m)
    Upv = None
    if U_prev is not None:
        Upv = np.asarray(getattr(U_prev, "values", U_prev), dtype=float).reshape(-1, m)

    n_cells = len(mesh.active_triangles)
    # cached mesh arrays are built here, not inside the worker threads
    mesh.cell_points, mesh.basis_gradients, mesh.areas, mesh.cell_vertices
    terms = chunked_map(_cell_terms(form, mesh, t, Uv, Upv, rule, jacobian), n_cells, threads)
    blocks = [(mesh.cell_vertices, terms)]

    if form.boundary_fluxes:
        owner, _ = mesh.boundary_facets
        midpoints = _facet_midpoints(mesh)
        assigned = np.full(len(owner), -1)
        for idx, entry in enumerate(form.boundary_fluxes):
            hit = np.asarray(entry.region(midpoints), dtype=bool) & (assigned < 0)
            assigned[hit] = idx
        for idx, entry in enumerate(form.boundary_fluxes):
            facets = np.flatnonzero(assigned == idx)
            if len(facets):
                blocks.append(_facet_terms(form, mesh, t, Uv, facets, entry, jacobian))

    residual = np.zeros(n_dofs)
    rows, cols, data = [], [], []
    for vertices, block in blocks:
        dofs = _local_dofs(vertices, m)
        residual += np.bincount(dofs.ravel(), weights=block[0].ravel(), minlength=n_dofs)
        if jacobian:
            K = block[1]
            rows.append(np.broadcast_to(dofs[:, :, None], K.shape).ravel())
            cols.append(np.broadcast_to(dofs[:, None, :], K.shape).ravel())
            data.append(K.ravel())

    constrained, constraint_values = _constraints(form, mesh, t)
    delta = np.zeros(n_dofs)
    delta[constrained] = constraint_values - values[constrained]
    residual[constrained] = -delta[constrained]

    matrix = rhs = None
    if jacobian:
        J = sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_dofs, n_dofs),
        ).tocsr()
        rhs = -residual
        if len(constrained):
            free = np.ones(n_dofs)
            free[constrained] = 0.0
            rhs = rhs - free * (J @ delta)
            P_f = sparse.diags(free)
            J = (P_f @ J @ P_f + sparse.diags(1.0 - free)).tocsr()
        matrix = J
    logger.debug(
        "Assembled %s: %d cells, %d dofs, %d constrained, |R| = %.3e",
        form.name,
        n_cells,
        n_dofs,
        len(constrained),
        np.linalg.norm(residual),
    )
    return Assembly(matrix, residual, rhs, constrained, constraint_values)


def _facet_midpoints(mesh: StructuredMesh) -> np.ndarray:
    owner, local = mesh.boundary_facets
    pa = mesh.cell_points[owner, local]
    pb = mesh.cell_points[owner, (local + 1) % 3]
    return 0.5 * (pa + pb)
