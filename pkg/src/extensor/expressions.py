"""A small, safe arithmetic-expression evaluator for geometry config files."""

from __future__ import annotations

import ast
import math
from typing import Mapping

import numpy as np

from .errors import ConfigError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_BINARY = {
    ast.Add: lambda x, y: x + y,
    ast.Sub: lambda x, y: x - y,
    ast.Mult: lambda x, y: x * y,
    ast.Div: lambda x, y: x / y,
    ast.Pow: lambda x, y: x**y,
}
_UNARY = {ast.USub: lambda x: -x, ast.UAdd: lambda x: x}
# a comparison is turned into a signed margin that is positive when it holds
_MARGINS = {
    ast.Gt: lambda x, y: x - y,
    ast.GtE: lambda x, y: x - y,
    ast.Lt: lambda x, y: y - x,
    ast.LtE: lambda x, y: y - x,
}


class Expression:
    """A parsed expression over named variables.

    ``^`` is accepted as exponentiation.  A comparison ``lhs > rhs``
    evaluates to the margin ``lhs - rhs``, so validity predicates can be
    tested against a tolerance.
    """

    def __init__(self, text: str, names: tuple[str, ...] = ()):
        if not isinstance(text, str):
            text = repr(text)
        self.text = text
        try:
            self._tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from exc
        self._check(self._tree.body, set(names) | set(CONSTANTS))

    def _check(self, node: ast.AST, names: set[str]) -> None:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise ConfigError(f"unsupported literal in {self.text!r}")
        elif isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigError(f"unknown name {node.id!r} in {self.text!r}")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINARY:
                raise ConfigError(f"unsupported operator in {self.text!r}")
            self._check(node.left, names)
            self._check(node.right, names)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                raise ConfigError(f"unsupported operator in {self.text!r}")
            self._check(node.operand, names)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS or node.keywords or len(node.args) != 1:
                raise ConfigError(f"unsupported call in {self.text!r}")
            self._check(node.args[0], names)
        elif isinstance(node, ast.Compare):
            if len(node.ops) != 1 or type(node.ops[0]) not in _MARGINS:
                raise ConfigError(f"unsupported comparison in {self.text!r}")
            self._check(node.left, names)
            self._check(node.comparators[0], names)
        else:
            raise ConfigError(f"unsupported syntax {type(node).__name__} in {self.text!r}")

    def __call__(self, env: Mapping[str, float]) -> float:
        return float(self._eval(self._tree.body, env))

    def _eval(self, node: ast.AST, env: Mapping[str, float]):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else CONSTANTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINARY[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, env))
        if isinstance(node, ast.Call):
            return FUNCTIONS[node.func.id](self._eval(node.args[0], env))
        return _MARGINS[type(node.ops[0])](self._eval(node.left, env), self._eval(node.comparators[0], env))

    def __repr__(self) -> str:
        return f"Expression({self.text!r})"
