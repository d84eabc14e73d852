"""Semi-implicit time stepping."""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ddfem.config.settings import NewtonConfig, SolverConfig
from ddfem.fem.field import DiscreteField
from ddfem.fem.mesh import StructuredMesh
from ddfem.fem.norms import integrate
from ddfem.fem.solvers import solve_newton
from ddfem.model.model import PdeModel
from ddfem.model.weak_form import model_to_imex_form

logger = logging.getLogger(__name__)


def step_semi_implicit(
    model: PdeModel,
    mesh: StructuredMesh,
    U_prev: DiscreteField,
    dt: float,
    t: float = 0.0,
    newton: NewtonConfig | None = None,
    solver: SolverConfig | None = None,
    threads: int | None = None,
) -> DiscreteField:
    """
    One step from t to t + dt of

        mass (U^n - U^{n-1})/dt + div(F_c(U^{n-1}) - F_v(U^n)) = S_i(U^n) + S_e(U^{n-1}).

    Returns:
        The new state U^n.
    """
    form = model_to_imex_form(model, t + dt, dt)
    result = solve_newton(
        form, mesh, U0=U_prev, U_prev=U_prev, newton=newton, solver=solver, threads=threads
    )
    return result.field


@dataclass
class TimeHistory:
    """Per step record of a time loop, index 0 is the initial state."""

    times: list[float] = field(default_factory=list)
    mass: list[list[float]] = field(default_factory=list)


def run_time_loop(
    model: PdeModel,
    mesh: StructuredMesh,
    U0: DiscreteField,
    dt: float,
    steps: int,
    t0: float = 0.0,
    newton: NewtonConfig | None = None,
    solver: SolverConfig | None = None,
    threads: int | None = None,
    callback: Callable[[int, float, DiscreteField], None] | None = None,
) -> tuple[DiscreteField, TimeHistory]:
    """
    Run steps semi-implicit steps, recording int mass * U after each.

    Returns:
        Final state and the history.
    """
    history = TimeHistory()
    U = U0
    t = t0

    def record():
        history.times.append(t)
        history.mass.append(np.asarray(integrate(U, weight=model.mass)).tolist())

    record()
    for n in range(1, steps + 1):
        U = step_semi_implicit(model, mesh, U, dt, t, newton, solver, threads)
        t = t0 + n * dt
        record()
        logger.info("Step %d: t = %.4g, mass = %s", n, t, history.mass[-1])
        if callback is not None:
            callback(n, t, U)
    return U, history
