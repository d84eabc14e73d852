"""Solver and run settings."""

from dataclasses import dataclass

from ddfem.errors import ConfigError


@dataclass
class SolverConfig:
    """Configuration of the sparse linear solver."""

    method: str = "auto"  # auto | cg | bicgstab | direct
    rtol: float = 1e-10
    maxiter_factor: int = 10
    # relative tolerance of the symmetry check used by "auto"; finite difference
    # Jacobians of self-adjoint forms are symmetric to about 1e-9
    symmetry_tol: float = 1e-8
    # fall back to a sparse LU factorisation when the Krylov solver stalls
    direct_fallback: bool = True

    def __post_init__(self):
        if self.method not in ("auto", "cg", "bicgstab", "direct"):
            raise ConfigError(f"Unknown linear solver '{self.method}'")
        if not self.rtol > 0:
            raise ConfigError("Solver rtol must be positive", {"rtol": self.rtol})


@dataclass
class NewtonConfig:
    """Configuration of the damped Newton iteration."""

    atol: float = 1e-9
    rtol: float = 1e-10
    max_iterations: int = 25
    min_damping: float = 1.0 / 64.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("Newton needs at least one iteration")


@dataclass
class RunConfig:
    """Settings of one command line run."""

    out_dir: str = "output"
    threads: int = 1
    lang: str = "en"
    transformer: str | None = None
    allow_coarse: bool = False
    quiet: bool = False
    verbose: bool = False

    def __post_init__(self):
        self.threads = max(1, int(self.threads))
        if self.lang not in ("en", "cn"):
            raise ConfigError(f"Unsupported language '{self.lang}'", {"supported": ["en", "cn"]})
