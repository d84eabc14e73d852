"""Signed distance functions, CSG operators and the phase field domain."""

import numpy as np

from ddfem.geometry.base import SDF, finite_difference_gradient, sech2
from ddfem.geometry.domain import Domain, PhaseFieldParams, PointData
from ddfem.geometry.operators import (
    BaseOperator,
    Extrusion,
    Intersection,
    Invert,
    Revolution,
    Rotate,
    Round,
    Scale,
    Subtraction,
    Translate,
    Union,
    Xor,
)
from ddfem.geometry.primitives import Ball, Box, HalfPlane
from ddfem.geometry.serialize import sdf_from_dict, sdf_to_dict


def sdf_eval(node: SDF, x) -> np.ndarray:
    """Signed distance of x to the node's zero set (negative inside)."""
    return node(x)


def grad_sdf(node: SDF, x) -> np.ndarray:
    return node.gradient(node.check_points(x))


def chi(node: SDF, x) -> np.ndarray:
    return node.chi(x)


def phi(node: SDF, x, epsilon: float | None = None) -> np.ndarray:
    return node.phi(x, epsilon)


def projection(node: SDF, x) -> np.ndarray:
    return node.projection(x)


def boundary_projection(node: SDF, x) -> np.ndarray:
    return node.boundary_projection(x)


def external_projection(node: SDF, x) -> np.ndarray:
    return node.external_projection(x)


def search(node: SDF, name: str) -> SDF | None:
    return node.search(name)


def set_epsilon(node: SDF, epsilon: float) -> None:
    node.epsilon = epsilon


__all__ = [
    "SDF",
    "BaseOperator",
    "Ball",
    "Box",
    "HalfPlane",
    "Union",
    "Intersection",
    "Subtraction",
    "Xor",
    "Invert",
    "Translate",
    "Rotate",
    "Scale",
    "Round",
    "Extrusion",
    "Revolution",
    "Domain",
    "PhaseFieldParams",
    "PointData",
    "sdf_from_dict",
    "sdf_to_dict",
    "sdf_eval",
    "grad_sdf",
    "chi",
    "phi",
    "projection",
    "boundary_projection",
    "external_projection",
    "search",
    "set_epsilon",
    "sech2",
    "finite_difference_gradient",
]
