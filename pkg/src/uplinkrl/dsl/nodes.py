"""AST node types and evaluation for the reward expression language.

Nodes are frozen dataclasses, so structural equality is plain ==.
Evaluation is strict about domains: division by zero, log of a
non-positive value and sqrt of a negative value raise instead of
producing NaN, and any non-finite intermediate is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

from ..errors import EvalDomainError, UnknownFeatureError

MAX_DEPTH = 32

# function name -> arity
FUNCTIONS = {
    "abs": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "tanh": 1,
    "min": 2,
    "max": 2,
    "clip": 3,
}


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Feature:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Func:
    name: str
    args: Tuple["Expr", ...]


Expr = Union[Const, Feature, Neg, BinOp, Func]


def depth(expr: Expr) -> int:
    if isinstance(expr, (Const, Feature)):
        return 1
    if isinstance(expr, Neg):
        return 1 + depth(expr.operand)
    if isinstance(expr, BinOp):
        return 1 + max(depth(expr.left), depth(expr.right))
    return 1 + max((depth(a) for a in expr.args), default=0)


def node_count(expr: Expr) -> int:
    if isinstance(expr, (Const, Feature)):
        return 1
    if isinstance(expr, Neg):
        return 1 + node_count(expr.operand)
    if isinstance(expr, BinOp):
        return 1 + node_count(expr.left) + node_count(expr.right)
    return 1 + sum(node_count(a) for a in expr.args)


def feature_refs(expr: Expr) -> set:
    """All feature names referenced anywhere in the expression."""
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Feature):
        return {expr.name}
    if isinstance(expr, Neg):
        return feature_refs(expr.operand)
    if isinstance(expr, BinOp):
        return feature_refs(expr.left) | feature_refs(expr.right)
    out: set = set()
    for a in expr.args:
        out |= feature_refs(a)
    return out


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise EvalDomainError(f"{what} produced a non-finite value")
    return value


def evaluate(expr: Expr, bindings: dict) -> float:
    """Evaluate against a feature-name -> value mapping."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Feature):
        try:
            return float(bindings[expr.name])
        except KeyError:
            raise UnknownFeatureError(f"no binding for feature {expr.name!r}") from None
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, bindings)
    if isinstance(expr, BinOp):
        lhs = evaluate(expr.left, bindings)
        rhs = evaluate(expr.right, bindings)
        if expr.op == "+":
            return _finite(lhs + rhs, "addition")
        if expr.op == "-":
            return _finite(lhs - rhs, "subtraction")
        if expr.op == "*":
            return _finite(lhs * rhs, "multiplication")
        if rhs == 0.0:
            raise EvalDomainError("division by zero")
        return _finite(lhs / rhs, "division")
    args = [evaluate(a, bindings) for a in expr.args]
    return _apply_function(expr.name, args)


def _apply_function(name: str, args: list) -> float:
    if name == "abs":
        return abs(args[0])
    if name == "exp":
        try:
            return _finite(math.exp(args[0]), "exp")
        except OverflowError:
            raise EvalDomainError("exp overflow") from None
    if name == "log":
        if args[0] <= 0.0:
            raise EvalDomainError(f"log of non-positive value {args[0]}")
        return math.log(args[0])
    if name == "sqrt":
        if args[0] < 0.0:
            raise EvalDomainError(f"sqrt of negative value {args[0]}")
        return math.sqrt(args[0])
    if name == "tanh":
        return math.tanh(args[0])
    if name == "min":
        return min(args[0], args[1])
    if name == "max":
        return max(args[0], args[1])
    # clip(x, lo, hi)
    x, lo, hi = args
    if lo > hi:
        raise EvalDomainError(f"clip bounds inverted: [{lo}, {hi}]")
    return min(max(x, lo), hi)


def _precedence(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        return 1 if expr.op in "+-" else 2
    if isinstance(expr, Neg):
        return 3
    return 4


def to_source(expr: Expr) -> str:
    """Render to source text; parse(to_source(e)) is structurally equal to e."""
    if isinstance(expr, Const):
        return repr(expr.value)
    if isinstance(expr, Feature):
        return expr.name
    if isinstance(expr, Neg):
        inner = to_source(expr.operand)
        if _precedence(expr.operand) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, BinOp):
        own = _precedence(expr)
        left = to_source(expr.left)
        if _precedence(expr.left) < own:
            left = f"({left})"
        right = to_source(expr.right)
        # right side parenthesized at equal precedence to keep left association
        if _precedence(expr.right) <= own:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    args = ", ".join(to_source(a) for a in expr.args)
    return f"{expr.name}({args})"
