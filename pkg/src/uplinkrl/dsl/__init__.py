"""Reward expression language: parse, evaluate, validate, rank."""

from __future__ import annotations

from typing import Sequence

from ..errors import UnknownFeatureError
from .analysis import (
    LipschitzEstimate,
    ValidationResult,
    Violation,
    estimate_lipschitz,
    validate,
)
from .nodes import (
    FUNCTIONS,
    MAX_DEPTH,
    BinOp,
    Const,
    Expr,
    Feature,
    Func,
    Neg,
    depth,
    evaluate,
    feature_refs,
    node_count,
    to_source,
)
from .parser import parse


def compile_reward(expr: Expr, schema: Sequence[str] | None = None):
    """Wrap an expression as a feature-dict -> float callable.

    The callable advertises its referenced features via `feature_names`,
    which run_episode checks against the environment schema. Passing a
    schema here rejects stray references up front instead of at call time.
    """
    names = tuple(sorted(feature_refs(expr)))
    if schema is not None:
        missing = [n for n in names if n not in schema]
        if missing:
            raise UnknownFeatureError(
                f"expression references features outside the schema: {missing}"
            )

    def reward_fn(features: dict) -> float:
        return evaluate(expr, features)

    reward_fn.feature_names = names
    reward_fn.expr = expr
    return reward_fn


__all__ = [
    "BinOp",
    "Const",
    "Expr",
    "FUNCTIONS",
    "Feature",
    "Func",
    "LipschitzEstimate",
    "MAX_DEPTH",
    "Neg",
    "ValidationResult",
    "Violation",
    "compile_reward",
    "depth",
    "estimate_lipschitz",
    "evaluate",
    "feature_refs",
    "node_count",
    "parse",
    "to_source",
    "validate",
]
