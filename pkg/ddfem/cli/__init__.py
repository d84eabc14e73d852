"""Command implementations behind the ddfem command line."""

from ddfem.cli.checks import CheckResult, run_checks
from ddfem.cli.commands import (
    Reporter,
    SolveOutcome,
    cmd_convergence,
    cmd_render,
    cmd_solve,
    cmd_validate,
    sample_fields,
    solve_scene,
    write_manifest,
)

__all__ = [
    "CheckResult",
    "run_checks",
    "Reporter",
    "SolveOutcome",
    "cmd_convergence",
    "cmd_render",
    "cmd_solve",
    "cmd_validate",
    "sample_fields",
    "solve_scene",
    "write_manifest",
]
