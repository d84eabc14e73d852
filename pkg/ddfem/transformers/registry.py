"""Registry of named diffuse domain transformers."""

import functools
import logging
from typing import Callable

from ddfem.errors import RegistryError
from ddfem.geometry.domain import Domain
from ddfem.model.model import PdeModel
from ddfem.transformers.posttransformer import RawTransform, TransformedModel, posttransform
from ddfem.transformers.pretransformer import pretransform

logger = logging.getLogger(__name__)

Transformer = Callable[..., TransformedModel]

_TRANSFORMERS: dict[str, Transformer] = {}


def register_transformer(name: str, function: Transformer) -> None:
    """
    Make a transformer selectable by name.

    Raises:
        RegistryError: If the name is taken.
    """
    key = name.lower()
    if key in _TRANSFORMERS:
        raise RegistryError(f"Transformer '{name}' is already registered", {"available": list_transformers()})
    _TRANSFORMERS[key] = function
    logger.debug("Registered transformer %s", key)


def get_transformer(name: str) -> Transformer:
    key = name.lower()
    if key not in _TRANSFORMERS:
        raise RegistryError(f"Unknown transformer '{name}'", {"available": list_transformers()})
    return _TRANSFORMERS[key]


def list_transformers() -> list[str]:
    return sorted(_TRANSFORMERS)


def transformer(body=None, *, name: str | None = None, register: bool = True):
    """
    Decorator turning a transformer body into a full transformation.

    The body receives the pretransformed model, the original model, the
    domain, the boundary terms and any keyword options, and returns a dict
    of candidate methods (S_e_source, S_e_convection, S_outside, S_i_source,
    S_i_diffusion, F_c, F_v and optionally mass). The wrapper runs
    pretransform before it and posttransform after it.

    Example:
        >>> @transformer(name="my_ddm")
        ... def my_ddm(model, original, domain, bt, **options):
        ...     return {...}
    """

    def decorate(fn):
        label = (name or fn.__name__).lower()

        @functools.wraps(fn)
        def apply(model: PdeModel, domain: Domain, **options) -> TransformedModel:
            extended, bt = pretransform(model, domain)
            methods = dict(fn(extended, model, domain, bt, **options))
            mass = methods.pop("mass", None)
            raw = RawTransform(
                model=extended,
                original=model,
                domain=domain,
                bt=bt,
                methods=methods,
                name=label,
                mass=mass,
            )
            return posttransform(raw)

        apply.transformer_name = label
        if register:
            register_transformer(label, apply)
        return apply

    if body is not None:
        return decorate(body)
    return decorate
