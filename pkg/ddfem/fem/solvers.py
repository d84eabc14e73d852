"""Linear and Newton solvers for assembled systems."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ddfem.config.settings import NewtonConfig, SolverConfig
from ddfem.errors import SolverError
from ddfem.fem.assembly import assemble
from ddfem.fem.field import DiscreteField
from ddfem.fem.mesh import StructuredMesh
from ddfem.model.weak_form import WeakFormResidual

logger = logging.getLogger(__name__)


@dataclass
class LinearSolveResult:
    """Result of one linear solve."""

    solution: np.ndarray
    method: str
    iterations: int
    residual_norm: float


@dataclass
class NewtonResult:
    """Result of a Newton solve."""

    field: DiscreteField
    converged: bool
    iterations: int
    residual_norms: list[float] = field(default_factory=list)
    linear_iterations: list[int] = field(default_factory=list)
    methods: list[str] = field(default_factory=list)


def is_symmetric(A: sp.spmatrix, tol: float = 1e-10) -> bool:
    """Numerical symmetry check, max |A - A^T| <= tol * max |A|."""
    scale = abs(A).max() if A.nnz else 0.0
    diff = A - A.T
    return (abs(diff).max() if diff.nnz else 0.0) <= tol * max(scale, 1e-300)


def jacobi_preconditioner(A: sp.spmatrix) -> sp.spmatrix:
    diag = A.diagonal()
    safe = np.where(diag != 0.0, diag, 1.0)
    return sp.diags(1.0 / safe)


def solve_linear(A: sp.spmatrix, b: np.ndarray, config: SolverConfig | None = None) -> LinearSolveResult:
    """
    Solve A x = b.

    CG is used when A is numerically symmetric, BiCGStab otherwise, both
    Jacobi preconditioned with relative tolerance config.rtol and at most
    config.maxiter_factor * N iterations.

    Raises:
        SolverError: If the Krylov solver fails and no fallback is allowed,
            or the result is not finite.
    """
    config = config or SolverConfig()
    A = sp.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    n = A.shape[0]
    if not np.any(b):
        return LinearSolveResult(np.zeros(n), "trivial", 0, 0.0)

    method = config.method
    if method == "auto":
        method = "cg" if is_symmetric(A, config.symmetry_tol) else "bicgstab"

    iterations = 0
    if method == "direct":
        x = spla.spsolve(A.tocsc(), b)
    else:
        def count(_):
            nonlocal iterations
            iterations += 1

        krylov = spla.cg if method == "cg" else spla.bicgstab
        x, info = krylov(
            A,
            b,
            rtol=config.rtol,
            atol=0.0,
            maxiter=config.maxiter_factor * n,
            M=jacobi_preconditioner(A),
            callback=count,
        )
        if info != 0:
            relres = np.linalg.norm(b - A @ x) / np.linalg.norm(b)
            if not config.direct_fallback:
                raise SolverError(
                    f"{method} did not converge",
                    {"info": info, "iterations": iterations, "relative_residual": relres},
                )
            logger.warning(
                "%s stopped with info=%d (relative residual %.2e); using sparse LU",
                method,
                info,
                relres,
            )
            x = spla.spsolve(A.tocsc(), b)
            method = f"{method}+direct"

    if not np.all(np.isfinite(x)):
        raise SolverError("Linear solve produced non-finite values", {"method": method})
    residual_norm = float(np.linalg.norm(b - A @ x))
    logger.debug("%s: %d iterations, |b - Ax| = %.3e", method, iterations, residual_norm)
    return LinearSolveResult(x, method, iterations, residual_norm)


def solve_newton(
    form: WeakFormResidual,
    mesh: StructuredMesh,
    U0: DiscreteField | None = None,
    U_prev: DiscreteField | None = None,
    newton: NewtonConfig | None = None,
    solver: SolverConfig | None = None,
    threads: int | None = None,
) -> NewtonResult:
    """
    Damped Newton iteration on the assembled residual.

    Each step halves the update until the residual norm decreases (down to
    newton.min_damping). Converged when |R| <= atol or |R| <= rtol * |R_0|.

    Raises:
        SolverError: If the iteration does not converge.
    """
    newton = newton or NewtonConfig()
    solver = solver or SolverConfig()
    U = U0.copy() if U0 is not None else DiscreteField.zeros(mesh, form.dim_range)
    result = NewtonResult(field=U, converged=False, iterations=0)

    system = assemble(form, mesh, U, U_prev=U_prev, threads=threads)
    norm = float(np.linalg.norm(system.residual))
    initial = norm
    result.residual_norms.append(norm)
    for iteration in range(1, newton.max_iterations + 1):
        if norm <= newton.atol or norm <= newton.rtol * initial:
            result.converged = True
            break
        step = solve_linear(system.matrix, system.rhs, solver)
        result.linear_iterations.append(step.iterations)
        result.methods.append(step.method)

        damping = 1.0
        while True:
            trial = DiscreteField(mesh, U.values + damping * step.solution, form.dim_range)
            trial_residual = assemble(
                form, mesh, trial, U_prev=U_prev, jacobian=False, threads=threads
            ).residual
            trial_norm = float(np.linalg.norm(trial_residual))
            if trial_norm < (1.0 - 1e-4 * damping) * norm or damping <= newton.min_damping:
                break
            damping *= 0.5
        U = trial
        logger.info(
            "Newton %d: |R| = %.3e (damping %.3g, %s %d iterations)",
            iteration,
            trial_norm,
            damping,
            step.method,
            step.iterations,
        )
        result.iterations = iteration
        result.residual_norms.append(trial_norm)
        norm = trial_norm
        if norm <= newton.atol or norm <= newton.rtol * initial:
            result.converged = True
            break
        system = assemble(form, mesh, U, U_prev=U_prev, threads=threads)

    result.field = U
    if not result.converged:
        raise SolverError(
            "Newton iteration did not converge",
            {"iterations": result.iterations, "residual": norm, "initial": initial},
        )
    return result
