"""
Scene files: JSON descriptions of one diffuse domain experiment.

A scene names the geometry tree, the phase field width, the computational
box and its resolution, a built-in problem with coefficient overrides, the
boundary map and the solver settings:

    {
      "name": "poisson_ball",
      "geometry": {"kind": "ball", "radius": 1.0, "center": [0, 0], "name": "Ball"},
      "epsilon": 0.1,
      "box": [[-1.5, 1.5], [-1.5, 1.5]],
      "problem": "poisson",
      "boundary": [{"segment": "Ball", "type": "dirichlet", "value": 0}],
      "out_factor_i": 1.0
    }

Boundary entries have a "segment" (a node name, or "mesh" together with an
optional "where" expression in x for the computational box boundary), a
"type" (dirichlet, flux_c, flux_v, or flux with its alias flux_pair) and values given as numbers or
expressions.
"""

from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ddfem.boundary.conditions import BoundaryMap, DirichletValue, FluxC, FluxPair, FluxV
from ddfem.config.expression import as_function, compile_expression
from ddfem.config.settings import NewtonConfig, SolverConfig
from ddfem.errors import ConfigError, DdfemError
from ddfem.fem.mesh import FILTER_FACTOR, StructuredMesh, build_mesh, filter_cells
from ddfem.geometry.domain import Domain
from ddfem.geometry.serialize import sdf_from_dict
from ddfem.model.model import PdeModel
from ddfem.model.problems import build_problem, get_problem

# Acceptance runs resolve the interface with h <= RESOLUTION_FACTOR * epsilon.
RESOLUTION_FACTOR = 0.5

_KNOWN_KEYS = {
    "name",
    "description",
    "geometry",
    "epsilon",
    "box",
    "resolution",
    "h",
    "problem",
    "overrides",
    "boundary",
    "transformer",
    "out_factor_i",
    "out_factor_e",
    "penalty_exponent",
    "filter_factor",
    "solver",
    "newton",
    "time",
    "exact",
    "initial",
    "render",
    "convergence",
}

_CONDITION_ARGUMENTS = {
    "dirichlet": ("t", "x"),
    "flux_c": ("t", "x", "U", "n"),
    "flux_v": ("t", "x", "U", "DU", "n"),
}


@dataclass
class TimeSettings:
    """Semi-implicit time loop settings."""

    dt: float
    steps: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0 or int(self.steps) < 1:
            raise ConfigError("Time settings need dt > 0 and steps >= 1", {"dt": self.dt, "steps": self.steps})
        self.steps = int(self.steps)


@dataclass
class RenderSettings:
    """Fields sampled by the render command and the sampling grid."""

    fields: list[str] = field(default_factory=lambda: ["phi"])
    samples: int | None = None
    png_scale: int = 2


@dataclass
class ConvergenceSettings:
    """Epsilon sequence of a convergence study; h = h_factor * epsilon."""

    epsilons: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05])
    h_factor: float = RESOLUTION_FACTOR


@dataclass
class Scene:
    """
    A validated scene.

    Build the pieces of a run with build_domain, build_model and
    build_mesh; with_epsilon derives the scene of a convergence level.
    """

    name: str
    geometry: dict
    epsilon: float
    box: tuple[tuple[float, float], tuple[float, float]]
    resolution: tuple[int, int]
    problem: str
    overrides: dict[str, Any] = field(default_factory=dict)
    boundary: list[dict] = field(default_factory=list)
    transformer: str = "ddm1"
    out_factor_i: float | None = None
    out_factor_e: float | None = None
    penalty_exponent: float = 3.0
    filter_factor: float = FILTER_FACTOR
    solver: SolverConfig = field(default_factory=SolverConfig)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    time: TimeSettings | None = None
    exact: Any = None
    initial: Any = None
    render: RenderSettings = field(default_factory=RenderSettings)
    convergence: ConvergenceSettings = field(default_factory=ConvergenceSettings)
    source: str | None = None
    sha256: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def h(self) -> float:
        widths = [hi - lo for lo, hi in self.box]
        return max(w / n for w, n in zip(widths, self.resolution))

    def check_resolution(self, allow_coarse: bool = False) -> None:
        """
        Raises:
            ConfigError: If h > epsilon / 2 and coarse grids are not allowed.
        """
        limit = RESOLUTION_FACTOR * self.epsilon
        if self.h > limit * (1.0 + 1e-12) and not allow_coarse:
            raise ConfigError(
                "Grid too coarse for the interface: h must not exceed epsilon / 2",
                {"h": self.h, "epsilon": self.epsilon, "hint": "refine or pass --allow-coarse"},
            )

    def build_domain(self) -> Domain:
        """Domain with the scene epsilon; nodes with an epsilon of their own keep it."""
        omega = sdf_from_dict(copy.deepcopy(self.geometry))
        return Domain(omega, epsilon=self.epsilon, keep_node_epsilon=True)

    def build_boundary(self, domain: Domain) -> BoundaryMap | None:
        """The scene's boundary map, None when the problem default applies."""
        if not self.boundary:
            return None
        return build_boundary_map(self.boundary, domain)

    def build_model(self, domain: Domain) -> PdeModel:
        boundary = self.build_boundary(domain)
        if boundary is None:
            boundary = domain.omega
        model = build_problem(
            self.problem,
            boundary=boundary,
            overrides=self.overrides,
            out_factor_i=self.out_factor_i,
            out_factor_e=self.out_factor_e,
        )
        if self.exact is not None:
            model.exact = as_function(self.exact, ("t", "x"), state=True)
        if self.initial is not None:
            initial = as_function(self.initial, ("t", "x"), state=True)
            model.initial = lambda x: initial(0.0, x)
        return model

    def build_mesh(self, domain: Domain, check_connected: bool = True) -> StructuredMesh:
        """Uniform mesh of the box filtered at filter_factor * epsilon."""
        mesh = build_mesh(self.box, self.resolution)
        return filter_cells(mesh, domain, factor=self.filter_factor, check_connected=check_connected)

    def with_epsilon(self, epsilon: float, h_factor: float | None = None) -> Scene:
        """Copy with a new epsilon and the resolution giving h <= h_factor * epsilon."""
        h_factor = self.convergence.h_factor if h_factor is None else h_factor
        resolution = resolution_for(self.box, h_factor * epsilon)
        return dataclasses.replace(self, epsilon=float(epsilon), resolution=resolution)

    def summary(self) -> dict:
        """Parameter echo for run manifests."""
        return {
            "name": self.name,
            "epsilon": self.epsilon,
            "box": [list(b) for b in self.box],
            "resolution": list(self.resolution),
            "h": self.h,
            "problem": self.problem,
            "overrides": {k: v if not callable(v) else repr(v) for k, v in self.overrides.items()},
            "transformer": self.transformer,
            "out_factor_i": self.out_factor_i,
            "out_factor_e": self.out_factor_e,
            "penalty_exponent": self.penalty_exponent,
            "filter_factor": self.filter_factor,
            "time": dataclasses.asdict(self.time) if self.time else None,
        }


def resolution_for(box, h: float) -> tuple[int, int]:
    if not h > 0:
        raise ConfigError("Mesh size must be positive", {"h": h})
    return tuple(max(2, math.ceil((hi - lo) / h - 1e-9)) for lo, hi in box)


def _condition(entry: dict) -> Any:
    kind = entry.get("type")
    if kind == "dirichlet":
        return DirichletValue(
            as_function(entry.get("value", 0.0), _CONDITION_ARGUMENTS["dirichlet"], state=True)
        )
    if kind == "flux_c":
        return FluxC(as_function(entry.get("value", 0.0), _CONDITION_ARGUMENTS["flux_c"], state=True))
    if kind == "flux_v":
        return FluxV(as_function(entry.get("value", 0.0), _CONDITION_ARGUMENTS["flux_v"], state=True))
    if kind in ("flux", "flux_pair"):
        return FluxPair(
            as_function(entry.get("flux_c", 0.0), _CONDITION_ARGUMENTS["flux_c"], state=True),
            as_function(entry.get("flux_v", 0.0), _CONDITION_ARGUMENTS["flux_v"], state=True),
        )
    raise ConfigError(
        f"Unknown boundary type '{kind}'",
        {"entry": entry, "supported": ["dirichlet", "flux_c", "flux_v", "flux", "flux_pair"]},
    )


def _mesh_predicate(where: str | None):
    if where is None:
        return lambda x: np.ones(np.shape(x)[:-1], dtype=bool)
    expr = compile_expression(where, variables=("x",))

    def predicate(x):
        return np.broadcast_to(expr(x=x) != 0.0, np.shape(x)[:-1])

    predicate.expression = expr
    return predicate


def build_boundary_map(entries: list[dict], domain: Domain) -> BoundaryMap:
    """
    Boundary map of scene entries, in file order.

    Raises:
        ConfigError: On unknown segment names or malformed entries.
    """
    boundary = BoundaryMap()
    names = domain.omega.names()
    for entry in entries:
        if not isinstance(entry, dict) or "segment" not in entry:
            raise ConfigError("Boundary entries need a 'segment'", {"entry": entry})
        segment = entry["segment"]
        if segment == "mesh":
            boundary.add(_mesh_predicate(entry.get("where")), _condition(entry))
            continue
        if domain.omega.search(segment) is None:
            raise ConfigError(f"Unknown boundary segment '{segment}'", {"known": names})
        boundary.add(segment, _condition(entry))
    return boundary


def _pair(value, key: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' entries must be [min, max] pairs", {key: value})
    return lo, hi


def scene_from_dict(data: dict, source: str | None = None, sha256: str | None = None) -> Scene:
    """
    Validate parsed scene JSON.

    Raises:
        ConfigError: On missing or malformed settings.
    """
    if not isinstance(data, dict):
        raise ConfigError("A scene must be a JSON object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"Unknown scene key(s): {sorted(unknown)}", {"known": sorted(_KNOWN_KEYS)})
    for key in ("geometry", "epsilon", "box", "problem"):
        if key not in data:
            raise ConfigError(f"Scene is missing '{key}'", {"source": source})

    epsilon = float(data["epsilon"])
    if not epsilon > 0:
        raise ConfigError("epsilon must be positive", {"epsilon": epsilon})
    box_raw = data["box"]
    if not isinstance(box_raw, list) or len(box_raw) != 2:
        raise ConfigError("'box' must be [[xmin, xmax], [ymin, ymax]]", {"box": box_raw})
    box = tuple(_pair(b, "box") for b in box_raw)
    if any(lo >= hi for lo, hi in box):
        raise ConfigError("Box bounds must satisfy min < max", {"box": box_raw})

    if "resolution" in data:
        res = data["resolution"]
        resolution = (int(res), int(res)) if np.isscalar(res) else tuple(int(r) for r in res)
    elif "h" in data:
        resolution = resolution_for(box, float(data["h"]))
    else:
        resolution = resolution_for(box, RESOLUTION_FACTOR * epsilon)

    problem = data["problem"]
    overrides = dict(data.get("overrides") or {})
    if isinstance(problem, dict):
        overrides = {**dict(problem.get("overrides") or {}), **overrides}
        problem = problem.get("name")
    get_problem(str(problem))

    def section(cls, key):
        try:
            return cls(**dict(data.get(key) or {}))
        except TypeError as e:
            raise ConfigError(f"Invalid '{key}' settings", {"error": str(e)})

    scene = Scene(
        name=str(data.get("name") or (Path(source).stem if source else "scene")),
        geometry=data["geometry"],
        epsilon=epsilon,
        box=box,
        resolution=resolution,
        problem=str(problem),
        overrides=overrides,
        boundary=list(data.get("boundary") or []),
        transformer=str(data.get("transformer") or "ddm1"),
        out_factor_i=data.get("out_factor_i"),
        out_factor_e=data.get("out_factor_e"),
        penalty_exponent=float(data.get("penalty_exponent", 3.0)),
        filter_factor=float(data.get("filter_factor", FILTER_FACTOR)),
        solver=section(SolverConfig, "solver"),
        newton=section(NewtonConfig, "newton"),
        time=section(TimeSettings, "time") if data.get("time") else None,
        exact=data.get("exact"),
        initial=data.get("initial"),
        render=section(RenderSettings, "render"),
        convergence=section(ConvergenceSettings, "convergence"),
        source=source,
        sha256=sha256,
        raw=data,
    )
    # geometry and boundary names are checked eagerly
    try:
        scene.build_boundary(scene.build_domain())
    except ConfigError:
        raise
    except DdfemError as e:
        raise ConfigError(f"Invalid scene geometry: {e.message}", e.details)
    return scene


def load_scene(path: str | Path) -> Scene:
    """
    Read and validate a scene file.

    Raises:
        ConfigError: If the file is missing, not JSON or invalid.
    """
    path = Path(path)
    try:
        content = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"Cannot read scene file '{path}'", {"error": e.strerror})
    try:
        data = json.loads(content.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Scene file '{path}' is not valid JSON", {"error": str(e)})
    return scene_from_dict(data, source=str(path), sha256=hashlib.sha256(content).hexdigest())
