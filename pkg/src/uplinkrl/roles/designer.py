"""Reward-designer role: candidate generation, validation, ranking.

Candidates are requested one at a time, parsed and validated against the
feature schema and probe states, scored by the empirical smoothness
estimate, and the smoothest valid candidate wins. Every candidate's fate
is recorded so rejections are auditable.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..dsl import estimate_lipschitz, node_count, parse, to_source, validate
from ..errors import DesignError, DslError, SchemaError
from ..llm import AuditLog, render_prompt, request_json

log = logging.getLogger(__name__)


@dataclass
class RewardCandidate:
    """One candidate expression and everything we learned about it."""

    index: int
    source: str = ""
    explanation: str = ""
    expr: object = None
    violations: list = field(default_factory=list)
    lipschitz: Optional[float] = None
    nodes: Optional[int] = None
    status: str = "pending"

    def to_row(self) -> dict:
        return {
            "index": self.index,
            "source": self.source,
            "explanation": self.explanation,
            "status": self.status,
            "violations": self.violations,
            "lipschitz": self.lipschitz,
            "nodes": self.nodes,
        }


@dataclass
class DesignOutcome:
    selected: RewardCandidate
    candidates: list


def _check_candidate(obj: dict) -> None:
    if not isinstance(obj.get("reward_expression"), str):
        raise SchemaError("reply must contain a string 'reward_expression'")
    if not isinstance(obj.get("explanation"), str):
        raise SchemaError("reply must contain a string 'explanation'")


def design_reward(
    backend,
    schema: Sequence[str],
    probes: Sequence[dict],
    *,
    task_description: str,
    constraints: Sequence[str],
    n_candidates: int = 3,
    decreasing_in: Optional[str] = "energy",
    delta: float = 1e-6,
    audit: Optional[AuditLog] = None,
    ledger_path=None,
) -> DesignOutcome:
    """Run the full candidate pipeline and return the smoothest survivor.

    Ties on the smoothness estimate break toward fewer AST nodes, then
    toward earlier generation order. Raises DesignError when no candidate
    survives validation; the ledger still records every rejection.
    """
    request = render_prompt(
        "reward_designer",
        {
            "task_description": task_description,
            "feature_list": "\n".join(f"- {name}" for name in schema),
            "constraints": "\n".join(f"- {c}" for c in constraints),
        },
    )

    candidates = []
    for i in range(n_candidates):
        cand = RewardCandidate(index=i)
        candidates.append(cand)
        try:
            obj, _ = request_json(
                backend, request, _check_candidate, audit, kind="design", template="reward_designer"
            )
        except SchemaError as exc:
            cand.status = "rejected-malformed"
            cand.violations = [str(exc)]
            continue
        cand.source = obj["reward_expression"]
        cand.explanation = obj["explanation"]
        try:
            cand.expr = parse(cand.source)
        except DslError as exc:
            cand.status = "rejected-unparseable"
            cand.violations = [str(exc)]
            continue
        cand.nodes = node_count(cand.expr)
        result = validate(cand.expr, schema, probes, decreasing_in=decreasing_in)
        if not result.ok:
            cand.status = "rejected-validation"
            cand.violations = [f"{v.code}: {v.message}" for v in result.violations]
            continue
        try:
            est = estimate_lipschitz(cand.expr, probes, feature_order=schema, delta=delta)
        except DslError as exc:
            cand.status = "rejected-validation"
            cand.violations = [f"estimation: {exc}"]
            continue
        cand.lipschitz = est.value
        cand.status = "valid"

    valid = [c for c in candidates if c.status == "valid"]
    if not valid:
        _write_ledger(ledger_path, candidates, selected=None)
        summary = "; ".join(
            f"candidate {c.index}: {c.status} ({'; '.join(c.violations)})"
            for c in candidates
        )
        raise DesignError(f"no valid reward candidate among {n_candidates}: {summary}")

    selected = min(valid, key=lambda c: (c.lipschitz, c.nodes, c.index))
    for c in valid:
        c.status = "selected" if c is selected else "rejected-ranked-lower"
    _write_ledger(ledger_path, candidates, selected)
    log.info(
        "selected reward candidate %d (%s), smoothness %.6g",
        selected.index,
        to_source(selected.expr),
        selected.lipschitz,
    )
    return DesignOutcome(selected=selected, candidates=candidates)


def _write_ledger(ledger_path, candidates, selected) -> None:
    if ledger_path is None:
        return
    path = Path(ledger_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        for cand in candidates:
            fh.write(json.dumps({"kind": "candidate", **cand.to_row()}) + "\n")
        fh.write(
            json.dumps(
                {
                    "kind": "selection",
                    "selected_index": None if selected is None else selected.index,
                }
            )
            + "\n"
        )
