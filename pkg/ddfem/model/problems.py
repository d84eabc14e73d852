"""Built-in problems selectable by name from the command line and scene files."""

from collections.abc import Mapping
from typing import Any, Callable

import numpy as np

from ddfem.boundary.conditions import BoundaryMap, DirichletValue, FluxPair, FluxV
from ddfem.config.expression import as_function
from ddfem.errors import ModelError, RegistryError
from ddfem.geometry.base import SDF
from ddfem.model.model import PdeModel

TX = ("t", "x")


def _boundary(boundary, default) -> BoundaryMap | Mapping | None:
    """A bare segment key gets the problem's default condition."""
    if isinstance(boundary, (SDF, str)):
        return {boundary: default}
    return boundary


def _params(overrides: Mapping[str, Any] | None, defaults: dict[str, Any]) -> dict[str, Callable]:
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(defaults)
    if unknown:
        raise ModelError(
            f"Unknown coefficient override(s): {sorted(unknown)}", {"known": sorted(defaults)}
        )
    merged = {**defaults, **overrides}
    return {name: as_function(value, TX) for name, value in merged.items()}


def _scalar(fn: Callable, t, x) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(t, x), dtype=float), x.shape[:-1])


def _vector(fn: Callable, t, x) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(t, x), dtype=float), x.shape)


def _outer(U, b):
    return U[:, :, None] * b[:, None, :]


def poisson(boundary=None, overrides=None, **kwargs) -> PdeModel:
    """
    -div(grad u) = f with u = g, by default f = -1 and g = 0.

    The default exact solution (|x|^2 - 1)/4 belongs to the unit ball.
    """
    p = _params(
        overrides,
        {"f": -1.0, "g": 0.0, "exact": "(dot(x, x) - 1) / 4"},
    )
    return PdeModel(
        dim_range=1,
        F_v=lambda t, x, U, DU: DU,
        S_i=lambda t, x, U, DU: _scalar(p["f"], t, x)[:, None],
        boundary=_boundary(boundary, DirichletValue(lambda t, x: _scalar(p["g"], t, x)[:, None])),
        exact=lambda t, x: _scalar(p["exact"], t, x)[:, None],
        name="poisson",
        **kwargs,
    )


def advection_diffusion(boundary=None, overrides=None, **kwargs) -> PdeModel:
    """
    -div(D grad u) + div(b u) + c u = f with u = g.

    Defaults: D = 0.1 - 0.05|x|^2, b = 3 (x_1, -x_0), c = 0.01,
    f = 0.1 (1 - |x|^2), g = sin(pi x_0) sin(pi x_1).
    """
    p = _params(
        overrides,
        {
            "D": "0.1 - 0.05 * dot(x, x)",
            "b": "3 * [x[1], -x[0]]",
            "c": 0.01,
            "f": "0.1 * (1 - dot(x, x))",
            "g": "sin(pi * x[0]) * sin(pi * x[1])",
        },
    )
    return PdeModel(
        dim_range=1,
        F_c=lambda t, x, U: _outer(U, _vector(p["b"], t, x)),
        F_v=lambda t, x, U, DU: _scalar(p["D"], t, x)[:, None, None] * DU,
        S_i=lambda t, x, U, DU: (_scalar(p["f"], t, x)[:, None] - _scalar(p["c"], t, x)[:, None] * U),
        boundary=_boundary(boundary, DirichletValue(lambda t, x: _scalar(p["g"], t, x)[:, None])),
        name="advection_diffusion",
        **kwargs,
    )


def heat_neumann(boundary=None, overrides=None, **kwargs) -> PdeModel:
    """du/dt - div(D grad u) = 0 with zero normal flux; D = 1 by default."""
    p = _params(
        overrides,
        {"D": 1.0, "initial": "exp(-10 * dot(x, x))"},
    )
    return PdeModel(
        dim_range=1,
        F_v=lambda t, x, U, DU: _scalar(p["D"], t, x)[:, None, None] * DU,
        boundary=_boundary(boundary, FluxV(lambda t, x, U, DU, n: 0.0)),
        initial=lambda x: _scalar(p["initial"], 0.0, x)[:, None],
        name="heat_neumann",
        **kwargs,
    )


def reaction3(boundary=None, overrides=None, **kwargs) -> PdeModel:
    """
    Three species advected by V, diffusing with D and reacting u0 + u1 -> 2 u2.

    Two disc sources of strength 5 and radius 0.04 at (-0.25, -0.25) and
    (0.25, 0.25) feed u0 and u1 while t < 10. The reaction k R(u) with
    R = (u0 u1, u0 u1, -2 u0 u1) is explicit, as is the convection.
    """
    p = _params(
        overrides,
        {
            "D": 0.001,
            "k": 10.0,
            "V": "[-x[1], x[0]]",
            "f0": "5 * (norm(x - [-0.25, -0.25]) < 0.04) * (t < 10)",
            "f1": "5 * (norm(x - [0.25, 0.25]) < 0.04) * (t < 10)",
        },
    )

    def S_e(t, x, U, DU):
        rate = _scalar(p["k"], t, x) * U[:, 0] * U[:, 1]
        out = np.empty_like(U)
        out[:, 0] = _scalar(p["f0"], t, x) - rate
        out[:, 1] = _scalar(p["f1"], t, x) - rate
        out[:, 2] = 2.0 * rate
        return out

    zero = lambda *args: 0.0  # noqa: E731
    return PdeModel(
        dim_range=3,
        F_c=lambda t, x, U: _outer(U, _vector(p["V"], t, x)),
        F_v=lambda t, x, U, DU: _scalar(p["D"], t, x)[:, None, None] * DU,
        S_e=S_e,
        boundary=_boundary(boundary, FluxPair(zero, zero)),
        initial=lambda x: np.zeros(x.shape[:-1] + (3,)),
        name="reaction3",
        **kwargs,
    )


PROBLEMS: dict[str, Callable[..., PdeModel]] = {
    "poisson": poisson,
    "advection_diffusion": advection_diffusion,
    "heat_neumann": heat_neumann,
    "reaction3": reaction3,
}


def list_problems() -> list[str]:
    return sorted(PROBLEMS)


def get_problem(name: str) -> Callable[..., PdeModel]:
    if name not in PROBLEMS:
        raise RegistryError(f"Unknown problem '{name}'", {"available": list_problems()})
    return PROBLEMS[name]


def build_problem(name: str, boundary=None, overrides=None, **kwargs) -> PdeModel:
    """
    Build a named problem.

    Args:
        name: Registered problem name.
        boundary: Boundary map, or a single segment that gets the problem's
            default condition.
        overrides: Coefficient overrides (numbers, expression strings in t
            and x, or callables (t, x)).
        **kwargs: Further PdeModel fields such as out_factor_i.
    """
    return get_problem(name)(boundary=boundary, overrides=overrides, **kwargs)
