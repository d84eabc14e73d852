"""Settings, expression grammar and UI messages.

Scene loading lives in ddfem.config.scene, imported explicitly since it
depends on the model package.
"""

from ddfem.config.expression import Expression, as_function, compile_expression
from ddfem.config.i18n import get_message, get_messages
from ddfem.config.settings import NewtonConfig, RunConfig, SolverConfig

__all__ = [
    "Expression",
    "as_function",
    "compile_expression",
    "get_message",
    "get_messages",
    "NewtonConfig",
    "RunConfig",
    "SolverConfig",
]
