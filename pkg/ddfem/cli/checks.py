"""Geometry and boundary invariant checks run by the validate command."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

from ddfem.cli.commands import _weight_terms, transform_model
from ddfem.config.scene import Scene
from ddfem.config.settings import RunConfig
from ddfem.errors import DdfemError
from ddfem.geometry.domain import Domain

N_SAMPLES = 4096
SEED = 7
PROJECTION_MISS = 0.1


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def halton_points(box, n: int = N_SAMPLES, seed: int = SEED) -> np.ndarray:
    """Scrambled Halton points in the box, reproducible through the seed."""
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    lower = [lo for lo, _ in box]
    upper = [hi for _, hi in box]
    return qmc.scale(sampler.random(n), lower, upper)


def _bounded(name: str, value: float, tolerance: float) -> CheckResult:
    return CheckResult(name, bool(value <= tolerance), float(value), tolerance, f"{value:.3e} <= {tolerance:.1e}")


def check_phase_field_range(domain: Domain, x: np.ndarray) -> CheckResult:
    phi = domain.phi(x)
    chi = domain.chi(x)
    bad = np.count_nonzero((phi < 0) | (phi > 1)) + np.count_nonzero((chi != 0) & (chi != 1))
    return CheckResult("phase field range", bad == 0, float(bad), 0.0, f"{bad} points outside [0, 1]")


def check_lipschitz(domain: Domain, x: np.ndarray) -> CheckResult:
    """|r(a) - r(b)| <= |a - b| on consecutive sample pairs."""
    a, b = x[:-1:2], x[1::2]
    r = domain.omega.sdf(np.concatenate([a, b]))
    ra, rb = r[: len(a)], r[len(a) :]
    ratio = np.abs(ra - rb) / np.maximum(np.linalg.norm(a - b, axis=1), 1e-300)
    return _bounded("sdf lipschitz bound", float(np.max(ratio)), 1.0 + 1e-9)


def check_projection(domain: Domain, x: np.ndarray) -> CheckResult:
    """
    P(x) lands on the zero level set for points outside the domain within
    the interface band. Max and min compositions are only bounds near
    corners, so up to PROJECTION_MISS of the samples may miss.
    """
    r = domain.sdf(x)
    band = (r > 0) & (r < 4 * domain.epsilon)
    if not np.any(band):
        return CheckResult("boundary projection", True, 0.0, 0.0, "no samples in the band")
    residual = np.abs(domain.omega.sdf(domain.boundary_projection(x[band])))
    missed = float(np.mean(residual > 1e-6))
    return CheckResult(
        "boundary projection",
        missed <= PROJECTION_MISS,
        missed,
        PROJECTION_MISS,
        f"{missed:.1%} of {int(band.sum())} band samples off the boundary, max {np.max(residual):.2e}",
    )


def check_partition_of_unity(scene: Scene, domain: Domain, x: np.ndarray) -> CheckResult:
    try:
        terms = _weight_terms(scene, domain)
    except DdfemError as e:
        return CheckResult("partition of unity", True, None, None, f"skipped: {e.message}")
    total = terms.normalized_weights(x).sum(axis=1)
    return _bounded("partition of unity", float(np.max(np.abs(total - 1.0))), 1e-12)


def check_transform(scene: Scene, domain: Domain, x: np.ndarray, run: RunConfig) -> CheckResult:
    """The transformed coefficients evaluate to finite values."""
    try:
        model = transform_model(scene, domain, run)
    except DdfemError as e:
        return CheckResult("transformation", False, None, None, e.message)
    m = model.dim_range
    U = np.zeros((len(x), m))
    DU = np.zeros((len(x), m, 2))
    values = [
        fn(*args)
        for fn, args in (
            (model.F_c, (0.0, x, U)),
            (model.F_v, (0.0, x, U, DU)),
            (model.S_i, (0.0, x, U, DU)),
            (model.S_e, (0.0, x, U, DU)),
        )
        if fn is not None
    ]
    finite = all(np.all(np.isfinite(v)) for v in values)
    exposed = ", ".join(sorted(model.composition.exposed()))
    return CheckResult("transformation", finite, None, None, exposed if finite else "non-finite values")


CHECKS: list[Callable] = [
    check_phase_field_range,
    check_lipschitz,
    check_projection,
]


def run_checks(scene: Scene, run: RunConfig | None = None, n: int = N_SAMPLES) -> list[CheckResult]:
    """Evaluate every check on Halton samples of the scene box."""
    run = run or RunConfig(quiet=True)
    domain = scene.build_domain()
    x = halton_points(scene.box, n)
    results = [check(domain, x) for check in CHECKS]
    results.append(check_partition_of_unity(scene, domain, x))
    results.append(check_transform(scene, domain, x, run))
    return results
