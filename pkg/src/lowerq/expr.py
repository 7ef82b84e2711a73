"""Small arithmetic expression language for metrics, weights and maps.

Supported: numbers, ``+ - * / ^`` (``**`` also accepted), unary minus,
parentheses, the functions ``sin cos exp log sqrt tanh`` (plus ``abs``,
``artanh``, ``pi``), and variables ``x1..xn``. Weight expressions may also
use ``r``, the geodesic distance to the ring center.

Expressions are compiled once into a numpy-vectorized callable::

    >>> f = compile_expression("1 + x1^2 + x2^2", ("x1", "x2"))
    >>> f(np.array([1.0, 2.0]), np.array([0.0, 1.0]))
    array([2., 6.])
"""

from __future__ import annotations

import ast
from typing import Callable

import numpy as np

from .errors import ExpressionError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
    "abs": np.abs,
    "artanh": np.arctanh,
}
CONSTANTS = {"pi": np.pi, "e": np.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.true_divide,
    ast.Pow: np.power,
}


def _check(node: ast.AST, variables: tuple[str, ...], source: str) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, variables, source)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"operator not allowed in {source!r}")
        _check(node.left, variables, source)
        _check(node.right, variables, source)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError(f"unary operator not allowed in {source!r}")
        _check(node.operand, variables, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError(f"unknown function in {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"functions take one argument: {source!r}")
        _check(node.args[0], variables, source)
    elif isinstance(node, ast.Name):
        if node.id not in variables and node.id not in CONSTANTS:
            raise ExpressionError(f"unknown variable {node.id!r} in {source!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ExpressionError(f"bad literal in {source!r}")
    else:
        raise ExpressionError(f"syntax not allowed in {source!r}")


def _evaluate(node: ast.AST, env: dict):
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp):
        value = _evaluate(node.operand, env)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.Call):
        return FUNCTIONS[node.func.id](_evaluate(node.args[0], env))
    if isinstance(node, ast.Name):
        return env[node.id] if node.id in env else CONSTANTS[node.id]
    return float(node.value)


def parse(source: str, variables: tuple[str, ...]) -> ast.Expression:
    text = str(source).replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
    _check(tree, variables, source)
    return tree


def compile_expression(source: str, variables: tuple[str, ...]) -> Callable:
    """Return ``f(*arrays)`` evaluating ``source`` with positional variables.

    The result always has the broadcast shape of the inputs, so constant
    expressions still yield arrays.
    """
    tree = parse(source, variables)

    def f(*args):
        arrays = [np.asarray(a, dtype=float) for a in args]
        env = dict(zip(variables, arrays))
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        with np.errstate(all="ignore"):
            value = _evaluate(tree.body, env)
        return np.broadcast_to(np.asarray(value, dtype=float), shape).copy()

    f.source = source
    return f


def coordinate_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def point_function(source: str, n: int, with_radius: bool = False) -> Callable:
    """Compile ``source`` into ``f(x, r)`` where ``x`` has shape (..., n)."""
    names = coordinate_names(n) + (("r",) if with_radius else ())
    g = compile_expression(source, names)

    def f(x, r=None):
        x = np.asarray(x, dtype=float)
        cols = [x[..., i] for i in range(n)]
        if with_radius:
            cols.append(np.zeros(x.shape[:-1]) if r is None else np.asarray(r, dtype=float))
        return g(*cols)

    f.source = source
    return f
