"""
ddfem - Diffuse domain methods on composable signed distance functions.

This package builds complex domains from signed distance functions,
transforms advection-diffusion-reaction models into diffuse domain form
on a larger box, and verifies the transformation with a small P1 finite
element solver.
"""

from ddfem.boundary import BoundaryTerms, DirichletValue, FluxC, FluxPair, FluxV
from ddfem.geometry import Domain
from ddfem.model import PdeModel
from ddfem.transformers import ddm1_transform, get_transformer

__version__ = "0.1.0"
__all__ = [
    "BoundaryTerms",
    "DirichletValue",
    "Domain",
    "FluxC",
    "FluxPair",
    "FluxV",
    "PdeModel",
    "ddm1_transform",
    "get_transformer",
]
