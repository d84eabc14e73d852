"""P1 finite elements on filtered structured triangle meshes."""

from ddfem.fem.assembly import JACOBIAN_STEP, Assembly, assemble
from ddfem.fem.field import DiscreteField
from ddfem.fem.mesh import FILTER_FACTOR, StructuredMesh, build_mesh, filter_cells
from ddfem.fem.norms import dirichlet_energy, error_norm_L2, integrate
from ddfem.fem.parallel import chunked_map, default_threads
from ddfem.fem.quadrature import (
    SEGMENT_GAUSS2,
    TRIANGLE_DEGREE2,
    TRIANGLE_DEGREE4,
    Quadrature,
)
from ddfem.fem.solvers import (
    LinearSolveResult,
    NewtonResult,
    is_symmetric,
    jacobi_preconditioner,
    solve_linear,
    solve_newton,
)
from ddfem.fem.timestepping import TimeHistory, run_time_loop, step_semi_implicit

__all__ = [
    "JACOBIAN_STEP",
    "Assembly",
    "assemble",
    "DiscreteField",
    "FILTER_FACTOR",
    "StructuredMesh",
    "build_mesh",
    "filter_cells",
    "dirichlet_energy",
    "error_norm_L2",
    "integrate",
    "chunked_map",
    "default_threads",
    "SEGMENT_GAUSS2",
    "TRIANGLE_DEGREE2",
    "TRIANGLE_DEGREE4",
    "Quadrature",
    "LinearSolveResult",
    "NewtonResult",
    "is_symmetric",
    "jacobi_preconditioner",
    "solve_linear",
    "solve_newton",
    "TimeHistory",
    "run_time_loop",
    "step_semi_implicit",
]
