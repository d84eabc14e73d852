"""Implementations of the render, solve, convergence and validate commands."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ddfem import __version__
from ddfem.boundary.conditions import DirichletValue
from ddfem.boundary.terms import BoundaryTerms
from ddfem.config.i18n import get_message
from ddfem.config.scene import Scene
from ddfem.config.settings import RunConfig
from ddfem.errors import ConfigError
from ddfem.fem.field import DiscreteField
from ddfem.fem.mesh import StructuredMesh, build_mesh
from ddfem.fem.norms import error_norm_L2
from ddfem.fem.parallel import chunked_map
from ddfem.fem.solvers import solve_newton
from ddfem.fem.timestepping import run_time_loop
from ddfem.geometry.domain import Domain
from ddfem.io.snapshot import save_snapshot
from ddfem.io.tables import write_point_csv, write_table
from ddfem.io.vtk import write_field, write_structured_grid
from ddfem.model.model import PdeModel
from ddfem.model.weak_form import model_to_weak_form
from ddfem.transformers import TransformedModel, get_transformer

logger = logging.getLogger(__name__)

SCALAR_FIELDS = ("sdf", "chi", "phi", "surface_delta")


class Reporter:
    """Check-list style progress output ("1. Building mesh... ✅ OK")."""

    def __init__(self, run: RunConfig):
        self.run = run
        self.count = 0

    def _print(self, *args, **kwargs) -> None:
        if not self.run.quiet:
            print(*args, **kwargs, flush=True)

    def header(self, title: str) -> None:
        self._print(f"🔍 {title}")
        self._print("-" * 50)

    def step(self, key: str, detail: str = "") -> None:
        self.count += 1
        suffix = f" ({detail})" if detail else ""
        self._print(f"{self.count}. {get_message(key, self.run.lang)}{suffix}...", end=" ")

    def ok(self, detail: str = "") -> None:
        suffix = f" ({detail})" if detail else ""
        self._print(f"✅ {get_message('ok', self.run.lang)}{suffix}")

    def fail(self, detail: str = "") -> None:
        self._print(f"❌ {get_message('failed', self.run.lang)}")
        if detail:
            self._print(f"   {get_message('error', self.run.lang)}: {detail}")

    def footer(self, passed: bool = True) -> None:
        self._print("-" * 50)
        key = "checks_passed" if passed else "checks_failed"
        self._print(("✅ " if passed else "❌ ") + get_message(key, self.run.lang))


@dataclass
class SolveOutcome:
    """Result of one transformed solve."""

    model: TransformedModel
    mesh: StructuredMesh
    field: DiscreteField
    stats: dict = field(default_factory=dict)


# Shared steps --------------------------------------------------------------


def _out_dir(run: RunConfig, scene: Scene, command: str) -> Path:
    path = Path(run.out_dir) / scene.name / command
    path.mkdir(parents=True, exist_ok=True)
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, scene: Scene, files: list[Path], extra: dict | None = None) -> Path:
    """Echo scene hash, parameters, tool version and output file hashes."""
    manifest = {
        "tool": "ddfem",
        "version": __version__,
        "command": command,
        "scene": {"source": scene.source, "sha256": scene.sha256},
        "parameters": scene.summary(),
        "files": [{"name": p.name, "sha256": _sha256(p)} for p in sorted(files)],
    }
    manifest.update(extra or {})
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def transform_model(scene: Scene, domain: Domain, run: RunConfig) -> TransformedModel:
    model = scene.build_model(domain)
    apply = get_transformer(run.transformer or scene.transformer)
    return apply(model, domain, penalty_exponent=scene.penalty_exponent)


def initial_field(model: PdeModel, mesh: StructuredMesh) -> DiscreteField:
    if model.initial is None:
        return DiscreteField.zeros(mesh, model.dim_range)
    return DiscreteField.interpolate(mesh, model.initial, model.dim_range)


def solve_scene(scene: Scene, run: RunConfig, reporter: Reporter | None = None) -> SolveOutcome:
    """
    Build, transform and solve a scene: stationary Newton, or the
    semi-implicit time loop when the scene has time settings.
    """
    reporter = reporter or Reporter(RunConfig(quiet=True))
    scene.check_resolution(run.allow_coarse)
    stats: dict = {}

    reporter.step("building_domain")
    domain = scene.build_domain()
    reporter.ok(f"epsilon {domain.epsilon:g}")

    reporter.step("filtering_mesh")
    mesh = scene.build_mesh(domain)
    reporter.ok(f"{mesh.n_cells} {get_message('cells', run.lang)}")

    reporter.step("transforming", run.transformer or scene.transformer)
    model = transform_model(scene, domain, run)
    reporter.ok(", ".join(sorted(model.composition.exposed())))

    started = time.perf_counter()
    if scene.time is None:
        reporter.step("assembling")
        form = model_to_weak_form(model)
        result = solve_newton(
            form,
            mesh,
            initial_field(model, mesh),
            newton=scene.newton,
            solver=scene.solver,
            threads=run.threads,
        )
        U = result.field
        stats.update(
            newton_iterations=result.iterations,
            residual_norms=result.residual_norms,
            linear_iterations=result.linear_iterations,
            linear_methods=result.methods,
        )
        reporter.ok(f"{result.iterations} {get_message('iterations', run.lang)}")
    else:
        reporter.step("time_stepping", f"{scene.time.steps} x dt={scene.time.dt:g}")
        U, history = run_time_loop(
            model,
            mesh,
            initial_field(model, mesh),
            scene.time.dt,
            scene.time.steps,
            t0=scene.time.t0,
            newton=scene.newton,
            solver=scene.solver,
            threads=run.threads,
        )
        initial_mass = np.asarray(history.mass[0])
        drift = np.abs(np.asarray(history.mass[-1]) - initial_mass) / np.maximum(np.abs(initial_mass), 1e-300)
        stats.update(times=history.times, mass=history.mass, mass_drift=drift.tolist())
        reporter.ok(f"{get_message('mass_drift', run.lang)} {float(np.max(drift)):.2e}")
    stats["solve_seconds"] = time.perf_counter() - started
    stats["cells"] = mesh.n_cells
    stats["dofs"] = mesh.n_dofs(model.dim_range)

    if model.exact is not None:
        t_end = scene.time.t0 + scene.time.dt * scene.time.steps if scene.time else 0.0
        stats["l2_error_chi"] = error_norm_L2(U, model.exact, "chi", domain, t=t_end)
        stats["l2_error_phi"] = error_norm_L2(U, model.exact, "phi", domain, t=t_end)
    return SolveOutcome(model, mesh, U, stats)


# Render --------------------------------------------------------------------


def _weight_terms(scene: Scene, domain: Domain) -> BoundaryTerms:
    """Boundary terms whose segments are the scene's diffuse segments, or
    every named node when the scene relies on the problem default."""
    boundary = scene.build_boundary(domain)
    if boundary is not None and boundary.diffuse:
        keys = [key for key, _ in boundary.diffuse]
    else:
        keys = [name for name in domain.omega.names() if name != domain.omega.name]
    if not keys:
        raise ConfigError("Weights need named boundary segments", {"known": domain.omega.names()})
    zero = DirichletValue(lambda t, x: 0.0)
    weights_model = PdeModel(dim_range=1, S_i=lambda t, x, U, DU: 0.0, boundary=[(k, zero) for k in keys])
    return BoundaryTerms(weights_model, domain)


def sample_fields(scene: Scene, domain: Domain, points: np.ndarray, names: list[str], threads: int = 1) -> dict[str, np.ndarray]:
    """Evaluate render fields at points; unknown names raise ConfigError."""
    weights = None
    samplers = {}
    for name in names:
        if name in SCALAR_FIELDS:
            samplers[name] = getattr(domain, name)
        elif name.startswith("weight:"):
            weights = weights or _weight_terms(scene, domain)
            index = weights.index_of(name.split(":", 1)[1])
            samplers[name] = lambda x, i=index: weights.normalized_weights(x)[:, i]
        else:
            raise ConfigError(
                f"Unknown field '{name}'",
                {"supported": [*SCALAR_FIELDS, "weight:<segment>"]},
            )

    def chunk(start: int, stop: int):
        x = points[start:stop]
        return tuple(np.asarray(samplers[name](x), dtype=float) for name in names)

    values = chunked_map(chunk, len(points), threads)
    if not isinstance(values, tuple):
        values = (values,)
    return dict(zip(names, values))


def cmd_render(scene: Scene, run: RunConfig, fields: list[str] | None = None) -> list[Path]:
    """Sample fields on the scene grid and write VTK, CSV and PNG files."""
    reporter = Reporter(run)
    reporter.header(f"render {scene.name}")
    names = list(fields or scene.render.fields)
    out_dir = _out_dir(run, scene, "render")

    reporter.step("building_domain")
    domain = scene.build_domain()
    reporter.ok(f"epsilon {domain.epsilon:g}")

    samples = scene.render.samples
    grid = build_mesh(scene.box, samples if samples else scene.resolution)
    reporter.step("sampling", ", ".join(names))
    data = sample_fields(scene, domain, grid.vertices, names, run.threads)
    reporter.ok(f"{len(grid.vertices)} points")

    reporter.step("writing_output", str(out_dir))
    files = [
        write_structured_grid(out_dir / "render.vtk", grid.shape, grid.vertices, data, title=f"{scene.name} render"),
        write_point_csv(out_dir / "render.csv", grid.vertices, data),
    ]
    nx, ny = grid.shape
    for name, values in data.items():
        label = name.replace(":", "_")
        bounds = (0.0, 1.0) if name in ("chi", "phi") or name.startswith("weight:") else (None, None)
        files.append(
            save_snapshot(
                out_dir / f"{label}.png",
                values.reshape(ny + 1, nx + 1),
                *bounds,
                scale=scene.render.png_scale,
            )
        )
    files.append(write_manifest(out_dir, "render", scene, files, {"fields": names}))
    reporter.ok(f"{len(files)} files")
    reporter.footer()
    return files


# Solve ---------------------------------------------------------------------


def _solution_extras(outcome: SolveOutcome) -> dict[str, np.ndarray]:
    domain = outcome.model.domain
    points = outcome.mesh.active_points()
    return {"phi": domain.phi(points), "chi": domain.chi(points)}


def cmd_solve(scene: Scene, run: RunConfig) -> dict:
    """Solve a scene and write solution.vtk, solution.csv, summary.json and the manifest."""
    reporter = Reporter(run)
    reporter.header(f"solve {scene.name}")
    out_dir = _out_dir(run, scene, "solve")
    outcome = solve_scene(scene, run, reporter)

    reporter.step("writing_output", str(out_dir))
    extras = _solution_extras(outcome)
    files = [
        write_field(out_dir / "solution.vtk", outcome.field, "U", extras),
        write_point_csv(
            out_dir / "solution.csv",
            outcome.mesh.active_points(),
            {"U": outcome.field.evaluate_vertices(), **extras},
        ),
    ]
    stats = dict(outcome.stats)
    # wall clock time lives in the manifest
    timing = {"solve_seconds": stats.pop("solve_seconds", None)}
    summary = {
        "scene": scene.name,
        "model": outcome.model.name,
        "transformer": outcome.model.transformer,
        "composition": sorted(outcome.model.composition.exposed()),
        **stats,
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    files.append(summary_path)
    files.append(write_manifest(out_dir, "solve", scene, files, {"timing": timing}))
    reporter.ok(f"{len(files)} files")
    if "l2_error_chi" in summary and not run.quiet:
        print(f"   L2 error (chi): {summary['l2_error_chi']:.6e}")
    reporter.footer()
    return summary


# Convergence ---------------------------------------------------------------


def cmd_convergence(scene: Scene, run: RunConfig, epsilons: list[float] | None = None) -> list[dict]:
    """
    Solve the scene for a decreasing epsilon sequence with h = h_factor * epsilon
    and tabulate the chi and phi weighted L2 errors against the exact solution.
    """
    reporter = Reporter(run)
    reporter.header(f"convergence {scene.name}")
    epsilons = list(epsilons or scene.convergence.epsilons)
    out_dir = _out_dir(run, scene, "convergence")
    quiet = RunConfig(
        out_dir=run.out_dir,
        threads=run.threads,
        lang=run.lang,
        transformer=run.transformer,
        allow_coarse=run.allow_coarse,
        quiet=True,
    )

    rows = []
    for epsilon in epsilons:
        level = scene.with_epsilon(epsilon)
        reporter.step("assembling", f"{get_message('epsilon', run.lang)} {epsilon:g}, h {level.h:.4g}")
        outcome = solve_scene(level, quiet)
        if "l2_error_chi" not in outcome.stats:
            reporter.fail("no exact solution")
            raise ConfigError("Convergence studies need an exact solution", {"scene": scene.name})
        row = {
            "epsilon": float(epsilon),
            "h": level.h,
            "cells": outcome.stats["cells"],
            "dofs": outcome.stats["dofs"],
            "l2_error_chi": outcome.stats["l2_error_chi"],
            "l2_error_phi": outcome.stats["l2_error_phi"],
        }
        if rows:
            previous = rows[-1]
            row["rate"] = float(
                np.log(previous["l2_error_chi"] / row["l2_error_chi"]) / np.log(previous["epsilon"] / epsilon)
            )
        else:
            row["rate"] = float("nan")
        rows.append(row)
        reporter.ok(f"L2 {row['l2_error_chi']:.4e}")

    header = ["epsilon", "h", "cells", "dofs", "l2_error_chi", "l2_error_phi", "rate"]
    files = [write_table(out_dir / "convergence.csv", header, [[r[k] for k in header] for r in rows])]
    files.append(write_manifest(out_dir, "convergence", scene, files, {"epsilons": epsilons}))
    reporter.footer()
    return rows


# Validate ------------------------------------------------------------------


def cmd_validate(scene: Scene, run: RunConfig) -> bool:
    """Run the geometry and boundary check suite; True if every check passes."""
    from ddfem.cli.checks import run_checks

    reporter = Reporter(run)
    reporter.header(f"validate {scene.name}")
    results = run_checks(scene, run)
    for result in results:
        reporter.step(result.name)
        if result.passed:
            reporter.ok(result.detail)
        else:
            reporter.fail(result.detail)
    passed = all(r.passed for r in results)
    out_dir = _out_dir(run, scene, "validate")
    report = out_dir / "checks.json"
    report.write_text(
        json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    write_manifest(out_dir, "validate", scene, [report], {"passed": passed})
    reporter.footer(passed)
    return passed
