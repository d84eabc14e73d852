"""Diffuse domain transformers and their registry."""

from ddfem.transformers.posttransformer import (
    SOURCE_METHODS,
    RawTransform,
    SourceComposition,
    TransformedModel,
    posttransform,
)
from ddfem.transformers.pretransformer import default_mesh_condition, outside_region, pretransform
from ddfem.transformers.registry import (
    get_transformer,
    list_transformers,
    register_transformer,
    transformer,
)
from ddfem.transformers.ddm1 import DEFAULT_PENALTY_EXPONENT, ddm1_transform  # registers "ddm1"

__all__ = [
    "DEFAULT_PENALTY_EXPONENT",
    "RawTransform",
    "SOURCE_METHODS",
    "SourceComposition",
    "TransformedModel",
    "ddm1_transform",
    "default_mesh_condition",
    "get_transformer",
    "list_transformers",
    "outside_region",
    "posttransform",
    "pretransform",
    "register_transformer",
    "transformer",
]
