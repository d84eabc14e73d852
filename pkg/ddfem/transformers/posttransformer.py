"""Composition of transformed methods into the final model."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ddfem.arrays import as_state
from ddfem.boundary.terms import BoundaryTerms
from ddfem.geometry.domain import Domain
from ddfem.model.model import PdeModel

logger = logging.getLogger(__name__)

# Table of composed methods: slot -> [(method, requirement on the input model)]
SOURCE_METHODS: dict[str, list[tuple[str, str]]] = {
    "S_e": [("S_e_source", "S_e"), ("S_e_convection", "F_c"), ("S_outside", "out_factor_e")],
    "S_i": [("S_i_source", "S_i"), ("S_i_diffusion", "F_v"), ("S_outside", "out_factor_i")],
}


@dataclass(frozen=True)
class SourceComposition:
    """Which methods enter each slot of the transformed model."""

    S_e: tuple[str, ...] = ()
    S_i: tuple[str, ...] = ()
    F_c: bool = False
    F_v: bool = False

    @classmethod
    def from_model(cls, model: PdeModel) -> SourceComposition:
        def included(slot: str) -> tuple[str, ...]:
            return tuple(
                method
                for method, requirement in SOURCE_METHODS[slot]
                if getattr(model, requirement) is not None
            )

        return cls(
            S_e=included("S_e"),
            S_i=included("S_i"),
            F_c=model.F_c is not None,
            F_v=model.F_v is not None,
        )

    def exposed(self) -> set[str]:
        """Names of the model methods the composition provides."""
        names = {slot for slot in ("S_e", "S_i") if getattr(self, slot)}
        names |= {slot for slot in ("F_c", "F_v") if getattr(self, slot)}
        return names


@dataclass
class RawTransform:
    """
    Output of a transformer body before composition.

    Args:
        model: Pretransformed model (extended coefficients, mesh boundary only).
        original: Model before the transformation; drives the composition.
        domain: Phase field domain.
        bt: Boundary terms of the original model.
        methods: Candidate methods by name (S_e_source, S_outside, F_c, ...).
        name: Transformer name.
        mass: Weight of the time derivative in the transformed model.
    """

    model: PdeModel
    original: PdeModel
    domain: Domain
    bt: BoundaryTerms
    methods: dict[str, Callable]
    name: str
    mass: Callable | None = None


@dataclass
class TransformedModel(PdeModel):
    """A PdeModel produced by a diffuse domain transformer."""

    domain: Domain | None = None
    bt: BoundaryTerms | None = None
    transformer: str = ""
    composition: SourceComposition = field(default_factory=SourceComposition)
    raw: RawTransform | None = None


def _compose(raw: RawTransform, parts: list[tuple[str, float]]) -> Callable | None:
    if not parts:
        return None
    fns = [(raw.methods[name], scale) for name, scale in parts]
    m = raw.model.dim_range

    def source(t, x, U, DU):
        total = np.zeros((np.shape(x)[0], m))
        for fn, scale in fns:
            value = fn(t, x, U, DU)
            if value is not None:
                total += scale * as_state(value, np.shape(x)[0], m)
        return total

    return source


def posttransform(raw: RawTransform | TransformedModel) -> TransformedModel:
    """
    Build the final model exposing only methods whose requirements are met.

    Applying it to an already composed model rebuilds the same composition.
    """
    if isinstance(raw, TransformedModel):
        raw = raw.raw
    original = raw.original
    composition = SourceComposition.from_model(original)
    scales = {"S_e": original.out_factor_e, "S_i": original.out_factor_i}

    def slot(name: str) -> Callable | None:
        parts = [
            (method, scales[name] if method == "S_outside" else 1.0)
            for method in getattr(composition, name)
        ]
        return _compose(raw, parts)

    model = raw.model
    result = TransformedModel(
        dim_range=model.dim_range,
        F_c=raw.methods["F_c"] if composition.F_c else None,
        F_v=raw.methods["F_v"] if composition.F_v else None,
        S_i=slot("S_i"),
        S_e=slot("S_e"),
        boundary=model.boundary,
        out_factor_i=original.out_factor_i,
        out_factor_e=original.out_factor_e,
        exact=original.exact,
        initial=original.initial,
        mass=raw.mass,
        name=f"{raw.name}({original.name})",
        domain=raw.domain,
        bt=raw.bt,
        transformer=raw.name,
        composition=composition,
        raw=raw,
    )
    logger.debug("Composed %s: %s", result.name, composition)
    return result
