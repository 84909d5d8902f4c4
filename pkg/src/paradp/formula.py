"""Small arithmetic/boolean formulas evaluated in exact rational arithmetic.

Formulas use Python expression syntax restricted to ``+ - * /``, unary minus,
``min``/``max``, numeric constants, variable names, comparisons and
``and``/``or``/``not``.  Numeric literals are read as :class:`Fraction`
(``0.1`` is exactly one tenth).
"""
from __future__ import annotations

import ast
import operator
from fractions import Fraction
from typing import Any, Callable, Mapping

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_CMPOPS = {
    ast.LtE: operator.le,
    ast.Lt: operator.lt,
    ast.GtE: operator.ge,
    ast.Gt: operator.gt,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}
_FUNCS = {"min": min, "max": max}


class FormulaError(ValueError):
    pass


class Formula:
    """A parsed formula; call it with a mapping from variable names to values."""

    def __init__(self, text: str):
        self.text = text
        try:
            tree = ast.parse(text.strip(), mode="eval")
        except SyntaxError as exc:
            raise FormulaError(f"cannot parse formula {text!r}: {exc.msg}") from None
        self.variables: set[str] = set()
        self._fn = self._compile(tree.body)

    def __call__(self, env: Mapping[str, Any]) -> Any:
        missing = self.variables - set(env)
        if missing:
            raise FormulaError(f"formula {self.text!r} needs values for {sorted(missing)}")
        return self._fn({k: _exact(v) for k, v in env.items()})

    def __repr__(self) -> str:
        return f"Formula({self.text!r})"

    def _compile(self, node: ast.AST) -> Callable[[Mapping[str, Any]], Any]:
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise FormulaError(f"unsupported constant {node.value!r}")
            value = _exact(node.value)
            return lambda env: value
        if isinstance(node, ast.Name):
            name = node.id
            self.variables.add(name)
            return lambda env: env[name]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op, lhs, rhs = _BINOPS[type(node.op)], self._compile(node.left), self._compile(node.right)
            return lambda env: op(lhs(env), rhs(env))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd, ast.Not)):
            arg = self._compile(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda env: -arg(env)
            if isinstance(node.op, ast.Not):
                return lambda env: not arg(env)
            return arg
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
                and node.func.id in _FUNCS and not node.keywords and node.args:
            fn = _FUNCS[node.func.id]
            args = [self._compile(a) for a in node.args]
            return lambda env: fn(a(env) for a in args)
        if isinstance(node, ast.Compare):
            parts = [self._compile(node.left)] + [self._compile(c) for c in node.comparators]
            ops = [_CMPOPS[type(o)] for o in node.ops if type(o) in _CMPOPS]
            if len(ops) != len(node.ops):
                raise FormulaError("unsupported comparison operator")

            def compare(env):
                vals = [p(env) for p in parts]
                return all(op(a, b) for op, a, b in zip(ops, vals, vals[1:]))

            return compare
        if isinstance(node, ast.BoolOp):
            parts = [self._compile(v) for v in node.values]
            if isinstance(node.op, ast.And):
                return lambda env: all(p(env) for p in parts)
            return lambda env: any(p(env) for p in parts)
        raise FormulaError(f"unsupported syntax {ast.dump(node)[:40]!r} in formula {self.text!r}")


def _exact(v: Any) -> Any:
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return Fraction(str(v))
    if isinstance(v, int):
        return Fraction(v)
    return v
