"""
Vectorised arithmetic expressions for coefficients in scene files.

Grammar (a subset of Python expressions, parsed with ``ast``, never eval'd):

    numbers, pi, e
    variables       t, x, U, DU, n        (x[0], U[1], DU[0][1] or DU[0, 1])
    arithmetic      + - * / ** %, unary -, parentheses
    comparisons     < <= > >= == !=, and / or / not
    conditionals    a if cond else b
    vectors         [a, b, ...] or (a, b, ...)
    functions       sin cos tan tanh sqrt exp log abs min max dot norm

Indices address the component axis, so ``x[1]`` is the second coordinate at
every evaluation point. ``min``/``max`` with two arguments act elementwise,
with one vector argument they reduce over its components.

Example:
    >>> expr = compile_expression("0.1 - 0.05 * dot(x, x)")
    >>> expr(x=[[0.0, 1.0]]).tolist()
    [0.05]
"""

import ast
import operator
from typing import Any, Callable

import numpy as np

from ddfem.errors import ConfigError

VARIABLES = ("t", "x", "U", "DU", "n")
# variables with a leading point axis
POINT_VARIABLES = frozenset({"x", "U", "DU", "n"})

CONSTANTS = {"pi": np.pi, "e": np.e}


def _reduce_or_pair(pair: Callable, reduce: Callable) -> Callable:
    def apply(*args):
        if len(args) == 1:
            return reduce(args[0], axis=-1)
        if len(args) == 2:
            return pair(*args)
        raise ConfigError("min/max take one vector or two values", {"count": len(args)})

    return apply


FUNCTIONS: dict[str, Callable[..., Any]] = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
    "min": _reduce_or_pair(np.minimum, np.min),
    "max": _reduce_or_pair(np.maximum, np.max),
    "dot": lambda a, b: np.sum(np.asarray(a) * np.asarray(b), axis=-1),
    "norm": lambda a: np.sqrt(np.sum(np.asarray(a) ** 2, axis=-1)),
}

_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.Mod: np.mod,
}

_UNARY = {
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
    ast.Not: np.logical_not,
}

_COMPARE = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}


class Expression:
    """
    A compiled scene expression.

    Args:
        text: Expression source.
        variables: Variable names the expression may use.

    Raises:
        ConfigError: On syntax errors or unsupported constructs.
    """

    def __init__(self, text: str, variables: tuple[str, ...] = VARIABLES):
        self.text = str(text).strip()
        self.variables = variables
        try:
            tree = ast.parse(self.text, mode="eval")
        except SyntaxError as e:
            raise ConfigError(f"Invalid expression '{self.text}'", {"error": e.msg})
        self.used: set[str] = set()
        self._validate(tree.body)
        self.body = tree.body

    def _fail(self, node: ast.AST, reason: str):
        raise ConfigError(
            f"Unsupported expression '{self.text}': {reason}",
            {"column": getattr(node, "col_offset", None)},
        )

    def _validate(self, node: ast.AST) -> None:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float, bool)):
                self._fail(node, "only numeric constants are allowed")
        elif isinstance(node, ast.Name):
            if node.id in self.variables:
                self.used.add(node.id)
            elif node.id not in CONSTANTS:
                self._fail(node, f"unknown name '{node.id}'")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINARY:
                self._fail(node, f"operator {type(node.op).__name__}")
            self._validate(node.left)
            self._validate(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                self._fail(node, f"operator {type(node.op).__name__}")
            self._validate(node.operand)
        elif isinstance(node, ast.Compare):
            for op in node.ops:
                if type(op) not in _COMPARE:
                    self._fail(node, f"comparison {type(op).__name__}")
            for child in [node.left, *node.comparators]:
                self._validate(child)
        elif isinstance(node, ast.BoolOp):
            for child in node.values:
                self._validate(child)
        elif isinstance(node, ast.IfExp):
            for child in (node.test, node.body, node.orelse):
                self._validate(child)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                self._fail(node, "only built-in functions can be called")
            if node.keywords:
                self._fail(node, "keyword arguments are not supported")
            for child in node.args:
                self._validate(child)
        elif isinstance(node, ast.Subscript):
            self._validate(node.value)
            index = node.slice
            parts = index.elts if isinstance(index, ast.Tuple) else [index]
            for part in parts:
                if not (isinstance(part, ast.Constant) and isinstance(part.value, int)):
                    self._fail(node, "indices must be integer literals")
        elif isinstance(node, (ast.List, ast.Tuple)):
            if not node.elts:
                self._fail(node, "empty vector")
            for child in node.elts:
                self._validate(child)
        else:
            self._fail(node, type(node).__name__)

    def __call__(self, t=0.0, x=None, U=None, DU=None, n=None) -> np.ndarray:
        env = {"t": t, "x": x, "U": U, "DU": DU, "n": n}
        for name in self.used:
            if env.get(name) is None:
                raise ConfigError(f"Expression '{self.text}' needs '{name}'")
            env[name] = np.asarray(env[name], dtype=float)
        return np.asarray(self._eval(self.body, env), dtype=float)

    def _eval(self, node: ast.AST, env: dict) -> Any:
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in self.variables else CONSTANTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINARY[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, env))
        if isinstance(node, ast.Compare):
            left = self._eval(node.left, env)
            result = True
            for op, right_node in zip(node.ops, node.comparators):
                right = self._eval(right_node, env)
                result = np.logical_and(result, _COMPARE[type(op)](left, right))
                left = right
            return result
        if isinstance(node, ast.BoolOp):
            combine = np.logical_and if isinstance(node.op, ast.And) else np.logical_or
            values = [self._eval(child, env) for child in node.values]
            result = values[0]
            for value in values[1:]:
                result = combine(result, value)
            return result
        if isinstance(node, ast.IfExp):
            return np.where(
                self._eval(node.test, env),
                self._eval(node.body, env),
                self._eval(node.orelse, env),
            )
        if isinstance(node, ast.Call):
            args = [self._eval(arg, env) for arg in node.args]
            return FUNCTIONS[node.func.id](*args)
        if isinstance(node, ast.Subscript):
            value = np.asarray(self._eval(node.value, env))
            index = node.slice
            parts = [p.value for p in index.elts] if isinstance(index, ast.Tuple) else [index.value]
            if value.ndim <= len(parts):
                return value[tuple(parts)]
            # leading axis holds the evaluation points
            return value[(slice(None), *parts)]
        # list or tuple literal
        values = [np.asarray(self._eval(child, env), dtype=float) for child in node.elts]
        return np.stack(np.broadcast_arrays(*values), axis=-1)

    def __repr__(self) -> str:
        return f"Expression({self.text!r})"


def compile_expression(text: str, variables: tuple[str, ...] = VARIABLES) -> Expression:
    """Compile an expression string, raising ConfigError on invalid input."""
    return Expression(text, variables)


def as_function(value, arguments: tuple[str, ...], state: bool = False) -> Callable:
    """
    Turn a number, expression string or callable into a point function.

    Args:
        value: Constant, expression source, or a callable taking ``arguments``
            positionally.
        arguments: Positional argument names of the resulting function,
            e.g. ("t", "x") or ("t", "x", "U", "DU").
        state: Give scalar results of point dependent expressions a trailing
            component axis, so they come out as (N, 1).

    Returns:
        Callable accepting the arguments positionally.
    """
    if callable(value):
        return value
    if isinstance(value, str):
        expr = compile_expression(value, variables=arguments)
        pointwise = state and bool(expr.used & POINT_VARIABLES)

        def evaluate(*args):
            result = expr(**dict(zip(arguments, args)))
            if pointwise and result.ndim == 1:
                return result[:, None]
            return result

        evaluate.expression = expr
        return evaluate
    if isinstance(value, (int, float, list, tuple)):
        constant = np.asarray(value, dtype=float)
        return lambda *args: constant
    raise ConfigError("Expected a number, expression string or callable", {"value": value})
