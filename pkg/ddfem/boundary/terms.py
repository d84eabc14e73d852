"""Weighted boundary machinery for mixed boundary conditions."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

import numpy as np

from ddfem.arrays import as_flux, as_state
from ddfem.boundary.conditions import (
    BoundaryMap,
    DirichletValue,
    FluxC,
    FluxPair,
    FluxV,
)
from ddfem.errors import BoundaryError
from ddfem.geometry.base import SDF
from ddfem.geometry.domain import Domain

logger = logging.getLogger(__name__)

# Below this total weight a point is far from every segment.
WEIGHT_FLOOR = 1e-14


@dataclass
class Segment:
    """One diffuse boundary segment with its condition."""

    node: SDF
    condition: DirichletValue | FluxC | FluxV | FluxPair
    label: str


@dataclass
class _PointCache:
    projected: np.ndarray
    delta: np.ndarray
    normal: np.ndarray
    weights: np.ndarray  # (N, S) unnormalised
    omega: np.ndarray  # (N, S) normalised


class BoundaryTerms:
    """
    Boundary terms G_V, G_{F_c}, G_{F_v} and the jump expressions.

    Segment weights are evaluated at the closest boundary point and
    normalised over all diffuse segments, so each neighbourhood of the
    boundary is governed by the condition of the segment it projects to.
    Projection, |grad phi|, normal and weights are computed once per point
    array and shared by all segment evaluations.

    Args:
        model: The PDE model whose boundary map is used.
        domain: Phase field domain containing every segment.

    Raises:
        BoundaryError: If a segment cannot be resolved or its flux wrapper
            does not match the fluxes the model defines.
    """

    def __init__(self, model, domain: Domain):
        self.model = model
        self.domain = domain
        self.dim_range = model.dim_range
        boundary = model.boundary if isinstance(model.boundary, BoundaryMap) else BoundaryMap(model.boundary)
        self.segments: list[Segment] = []
        for key, condition in boundary.diffuse:
            node = domain.segment(key)
            label = key if isinstance(key, str) else (node.name or repr(node))
            self._check_condition(condition, label)
            self.segments.append(Segment(node, condition, label))
        self.physical = list(boundary.mesh)
        self.dirichlet_index = [
            i for i, s in enumerate(self.segments) if isinstance(s.condition, DirichletValue)
        ]
        self.flux_index = [
            i for i, s in enumerate(self.segments) if not isinstance(s.condition, DirichletValue)
        ]
        self._local = threading.local()
        logger.debug(
            "Boundary terms: %d Dirichlet, %d flux, %d mesh entries",
            len(self.dirichlet_index),
            len(self.flux_index),
            len(self.physical),
        )

    def _check_condition(self, condition, label: str) -> None:
        if isinstance(condition, DirichletValue):
            return
        has_c = self.model.F_c is not None
        has_v = self.model.F_v is not None
        expected = {
            (True, True): FluxPair,
            (True, False): FluxC,
            (False, True): FluxV,
        }.get((has_c, has_v))
        if expected is None:
            raise BoundaryError(
                f"Flux condition on '{label}' but the model defines no flux",
                {"condition": type(condition).__name__},
            )
        if not isinstance(condition, expected):
            raise BoundaryError(
                f"Segment '{label}' needs {expected.__name__} for this model",
                {"got": type(condition).__name__, "F_c": has_c, "F_v": has_v},
            )

    # Index sets ----------------------------------------------------------

    @property
    def has_dirichlet(self) -> bool:
        return bool(self.dirichlet_index)

    @property
    def has_flux(self) -> bool:
        return bool(self.flux_index)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.segments]

    def index_of(self, key: SDF | str | int) -> int:
        if isinstance(key, int):
            return key
        for i, segment in enumerate(self.segments):
            if segment.label == key or segment.node is key or segment.node.name == key:
                return i
        raise BoundaryError(f"'{key}' is not a boundary segment", {"known": self.labels})

    # Point quantities ----------------------------------------------------

    def _points(self, x) -> _PointCache:
        if getattr(self._local, "key", None) is x:
            return self._local.data
        projected = self.domain.boundary_projection(x)
        n_seg = len(self.segments)
        shape = projected.shape[:-1]
        weights = np.empty(shape + (n_seg,), dtype=float)
        for i, segment in enumerate(self.segments):
            weights[..., i] = self.domain.segment_weight(segment.node, x, projected=projected)
        total = weights.sum(axis=-1, keepdims=True)
        far = total < WEIGHT_FLOOR
        omega = np.where(
            far, 1.0 / max(n_seg, 1), weights / np.where(far, 1.0, total)
        )
        data = _PointCache(
            projected=projected,
            delta=self.domain.surface_delta(x),
            normal=self.domain.normal(x),
            weights=weights,
            omega=omega,
        )
        self._local.key = x
        self._local.data = data
        return data

    def segment_weight(self, key: SDF | str | int, x) -> np.ndarray:
        """Unnormalised weight w_i at the closest boundary point of x."""
        return self._points(x).weights[..., self.index_of(key)]

    def normalized_weights(self, x) -> np.ndarray:
        """Weights omega_i with shape (..., n_segments); they sum to one."""
        if not self.segments:
            raise BoundaryError("No diffuse boundary segments")
        return self._points(x).omega

    def extend_value(self, g, t, x) -> np.ndarray:
        """Extension g(P(x)) of boundary data off the boundary."""
        return g(t, self._points(x).projected)

    # Aggregates ----------------------------------------------------------

    def _state(self, value, x) -> np.ndarray:
        return as_state(value, np.shape(x)[0], self.dim_range)

    def bnd_value_ext(self, t, x) -> np.ndarray | None:
        """G_V = sum over Dirichlet segments of omega_i * g_i(P(x))."""
        if not self.dirichlet_index:
            return None
        data = self._points(x)
        total = np.zeros((np.shape(x)[0], self.dim_range))
        for i in self.dirichlet_index:
            g = self._state(self.segments[i].condition(t, data.projected), x)
            total += data.omega[:, i, None] * g
        return total

    def jump_v(self, t, x, U) -> np.ndarray | None:
        """Sum over Dirichlet segments of omega_i * (U - g_i(P(x)))."""
        if not self.dirichlet_index:
            return None
        data = self._points(x)
        total = np.zeros((np.shape(x)[0], self.dim_range))
        for i in self.dirichlet_index:
            g = self._state(self.segments[i].condition(t, data.projected), x)
            total += data.omega[:, i, None] * (U - g)
        return total

    def bnd_flux_c_ext(self, t, x, U) -> np.ndarray | None:
        """G_{F_c} = sum over flux segments of omega_i * g_c,i * |grad phi|."""
        if not self.flux_index or self.model.F_c is None:
            return None
        data = self._points(x)
        total = np.zeros((np.shape(x)[0], self.dim_range))
        for i in self.flux_index:
            condition = self.segments[i].condition
            flux = condition.flux_c if isinstance(condition, FluxPair) else condition
            value = self._state(flux(t, data.projected, U, data.normal), x)
            total += data.omega[:, i, None] * value
        return total * data.delta[:, None]

    def bnd_flux_v_ext(self, t, x, U, DU) -> np.ndarray | None:
        """G_{F_v} = sum over flux segments of omega_i * g_v,i * |grad phi|."""
        if not self.flux_index or self.model.F_v is None:
            return None
        data = self._points(x)
        total = np.zeros((np.shape(x)[0], self.dim_range))
        for i in self.flux_index:
            condition = self.segments[i].condition
            flux = condition.flux_v if isinstance(condition, FluxPair) else condition
            value = self._state(flux(t, data.projected, U, DU, data.normal), x)
            total += data.omega[:, i, None] * value
        return total * data.delta[:, None]

    def jump_fv(self, t, x, U, DU) -> np.ndarray | None:
        """Sum over flux segments of omega_i * (F_v . n - g_v,i) * |grad phi|."""
        if not self.flux_index or self.model.F_v is None:
            return None
        data = self._points(x)
        n_points = np.shape(x)[0]
        d = np.shape(x)[-1]
        fv = as_flux(self.model.F_v(t, x, U, DU), n_points, self.dim_range, d)
        normal_flux = np.einsum("nmd,nd->nm", fv, data.normal)
        total = np.zeros((n_points, self.dim_range))
        for i in self.flux_index:
            condition = self.segments[i].condition
            flux = condition.flux_v if isinstance(condition, FluxPair) else condition
            value = self._state(flux(t, data.projected, U, DU, data.normal), x)
            total += data.omega[:, i, None] * (normal_flux - value)
        return total * data.delta[:, None]

    def __repr__(self) -> str:
        return f"BoundaryTerms(segments={self.labels}, mesh={len(self.physical)})"
