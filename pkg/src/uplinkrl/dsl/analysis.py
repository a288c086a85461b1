"""Static checks and smoothness estimation for reward expressions.

`validate` is the admission gate for machine-generated candidates;
`estimate_lipschitz` supplies the ranking score (smaller is smoother).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import DslError, EstimationError
from .nodes import MAX_DEPTH, Expr, depth, evaluate, feature_refs


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationResult:
    ok: bool
    violations: list


def validate(
    expr: Expr,
    schema: Sequence[str],
    probes: Sequence[dict],
    *,
    decreasing_in: Optional[str] = "energy",
    min_fraction: float = 0.9,
) -> ValidationResult:
    """Check a candidate expression against the schema and probe states.

    Three gates: every referenced feature must exist in the schema, the
    expression must produce a finite scalar on every probe, and when
    `decreasing_in` names a schema feature the reward must be strictly
    decreasing in it on at least `min_fraction` of constructed probe
    pairs (each probe versus a copy with that feature increased).
    """
    violations = []

    unresolved = sorted(feature_refs(expr) - set(schema))
    for name in unresolved:
        violations.append(Violation("unresolved-feature", f"feature {name!r} not in schema"))
    if depth(expr) > MAX_DEPTH:
        violations.append(
            Violation("too-deep", f"AST depth {depth(expr)} exceeds limit {MAX_DEPTH}")
        )
    if violations:
        return ValidationResult(False, violations)

    values = []
    for i, probe in enumerate(probes):
        try:
            values.append(evaluate(expr, probe))
        except DslError as exc:
            violations.append(Violation("probe-failure", f"probe {i}: {exc}"))
    if violations:
        return ValidationResult(False, violations)

    if decreasing_in is not None and decreasing_in in schema and probes:
        base = [float(p.get(decreasing_in, 0.0)) for p in probes]
        span = max(base) - min(base)
        bump = 0.1 * span if span > 0.0 else 0.1
        passed = 0
        for probe, value in zip(probes, values):
            bumped = dict(probe)
            bumped[decreasing_in] = float(bumped.get(decreasing_in, 0.0)) + bump
            try:
                if evaluate(expr, bumped) < value:
                    passed += 1
            except DslError:
                pass  # a failing pair counts against the fraction
        fraction = passed / len(probes)
        if fraction < min_fraction:
            violations.append(
                Violation(
                    "not-decreasing",
                    f"reward decreases in {decreasing_in!r} on only "
                    f"{fraction:.0%} of probe pairs (need {min_fraction:.0%})",
                )
            )

    return ValidationResult(not violations, violations)


@dataclass(frozen=True)
class LipschitzEstimate:
    value: float
    sample_count: int
    delta: float
    witness: tuple  # (probe_a, probe_b) achieving the max quotient


def estimate_lipschitz(
    expr: Expr,
    samples: Sequence[dict],
    feature_order: Optional[Sequence[str]] = None,
    delta: float = 1e-6,
) -> LipschitzEstimate:
    """Largest observed |R(s1) - R(s2)| / ||s1 - s2||_2 over sample pairs.

    Pairs closer than `delta` in the feature vector space are skipped to
    avoid amplifying rounding noise. Feature vectors are assembled in
    `feature_order` (default: sorted union of sample keys).
    """
    if feature_order is None:
        keys: set = set()
        for s in samples:
            keys |= set(s)
        feature_order = sorted(keys)
    order = list(feature_order)

    n = len(samples)
    if n < 2:
        raise EstimationError(f"need at least 2 samples, got {n}")

    vectors = np.array(
        [[float(s.get(k, 0.0)) for k in order] for s in samples], dtype=np.float64
    )
    rewards = np.array([evaluate(expr, s) for s in samples], dtype=np.float64)

    best = -1.0
    witness = None
    for i in range(n):
        diff = vectors[i + 1 :] - vectors[i]
        dist = np.sqrt(np.sum(diff * diff, axis=1))
        dr = np.abs(rewards[i + 1 :] - rewards[i])
        admissible = dist >= delta
        if not np.any(admissible):
            continue
        quot = np.where(admissible, dr / np.where(admissible, dist, 1.0), -np.inf)
        j = int(np.argmax(quot))
        if quot[j] > best:
            best = float(quot[j])
            witness = (dict(samples[i]), dict(samples[i + 1 + j]))

    if witness is None:
        raise EstimationError(
            f"no sample pair is at least delta={delta} apart; cannot estimate"
        )
    return LipschitzEstimate(value=best, sample_count=n, delta=delta, witness=witness)
