"""Decision-guider role: periodic hyperparameter adaptation with rollback.

Between training phases the guider summarizes recent history, asks a
backend for adjustments, and applies them through the clamp/rate-limit
envelope. A rollback controller watches window means and restores the
best-known hyperparameter snapshot when training degrades.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from ..errors import SchemaError
from ..llm import AuditLog, complete, render_prompt, request_json
from ..llm.client import ChatRequest
from .hyperparams import HyperparamSet

log = logging.getLogger(__name__)

GUIDANCE_INTERVAL = 10  # episodes between interventions
HISTORY_WINDOW = 10  # episodes summarized per report
ROLLBACK_TOLERANCE = 0.15


@dataclass
class GuidanceReport:
    """Snapshot of training state handed to the guider."""

    episode: int
    total_episodes: int
    window_returns: list
    loss_summary: dict
    exploration_stat: float
    hyperparams: dict
    rollback_notice: str = ""

    @property
    def progress(self) -> float:
        return min(1.0, self.episode / max(1, self.total_episodes))

    @property
    def window_mean(self) -> float:
        if not self.window_returns:
            return 0.0
        return float(sum(self.window_returns) / len(self.window_returns))

    def to_json(self) -> str:
        return json.dumps(
            {
                "episode": self.episode,
                "total_episodes": self.total_episodes,
                "progress": round(self.progress, 6),
                "window_returns": [round(r, 6) for r in self.window_returns],
                "window_mean": round(self.window_mean, 6),
                "loss_summary": self.loss_summary,
                "exploration_stat": self.exploration_stat,
                "hyperparams": self.hyperparams,
            },
            sort_keys=True,
        )


@dataclass
class GuidanceDirective:
    """Outcome of one intervention."""

    episode: int
    proposals: list = field(default_factory=list)
    applied: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    rolled_back: bool = False
    note: str = ""

    def to_row(self) -> dict:
        return {
            "episode": self.episode,
            "proposals": self.proposals,
            "applied": self.applied,
            "skipped": self.skipped,
            "rolled_back": self.rolled_back,
            "note": self.note,
        }


def _check_adjustments(obj: dict) -> None:
    if "adjustments" not in obj or not isinstance(obj["adjustments"], list):
        raise SchemaError("reply must contain an 'adjustments' list")
    for adj in obj["adjustments"]:
        if not isinstance(adj, dict) or not isinstance(adj.get("name"), str):
            raise SchemaError("each adjustment needs a string 'name'")
        if not isinstance(adj.get("new_value"), (int, float)) or isinstance(
            adj.get("new_value"), bool
        ):
            raise SchemaError("each adjustment needs a numeric 'new_value'")


def guide(
    backend,
    hparams: HyperparamSet,
    report: GuidanceReport,
    audit: Optional[AuditLog] = None,
) -> GuidanceDirective:
    """Ask the backend for adjustments and apply them under the envelope.

    Unknown names are skipped (and recorded); proposals are clamped to
    the certified range and then rate-limited against the current value.
    An unusable reply (after one re-prompt) yields an empty directive.
    """
    request = render_prompt(
        "decision_guider",
        {
            "report_json": report.to_json(),
            "whitelist_json": json.dumps(hparams.describe()),
            "rollback_notice": report.rollback_notice
            or "No rollback occurred in the last phase.",
        },
    )
    directive = GuidanceDirective(episode=report.episode)
    try:
        obj, _ = request_json(
            backend, request, _check_adjustments, audit, kind="guidance", template="decision_guider"
        )
    except SchemaError as exc:
        log.warning("guidance reply unusable, applying no changes: %s", exc)
        directive.note = f"reply unusable: {exc}"
        return directive

    directive.proposals = obj["adjustments"]
    for adj in obj["adjustments"]:
        name = adj["name"]
        proposed = float(adj["new_value"])
        rationale = str(adj.get("rationale", ""))
        if name not in hparams:
            directive.skipped.append({"name": name, "reason": "not-whitelisted"})
            log.warning("guidance proposed non-whitelisted %r, skipped", name)
            continue
        entry = hparams[name]
        old = entry.value
        applied, flags = entry.limited(proposed)
        hparams.set_value(name, applied)
        directive.applied.append(
            {
                "name": name,
                "old": old,
                "proposed": proposed,
                "applied": applied,
                "clamped": flags["clamped"],
                "rate_limited": flags["rate_limited"],
                "rationale": rationale,
            }
        )
    return directive


def check_rollback(window_means, tolerance: float = ROLLBACK_TOLERANCE):
    """Decide whether the newest window degraded past tolerance.

    Returns (should_rollback, best_prior_index). The rule is
    current < best_prior - tolerance * |best_prior|, which reduces to the
    plain (1 - tolerance) * best_prior threshold for positive means and
    stays meaningful for negative ones.
    """
    if len(window_means) < 2:
        return False, None
    current = window_means[-1]
    prior = window_means[:-1]
    best_index = max(range(len(prior)), key=lambda i: prior[i])
    best = prior[best_index]
    threshold = best - tolerance * abs(best)
    return current < threshold, best_index


class RollbackController:
    """Tracks window means and hyperparameter snapshots for recovery."""

    def __init__(self, tolerance: float = ROLLBACK_TOLERANCE):
        self.tolerance = tolerance
        self._means: list = []
        self._snapshots: list = []

    def record_window(self, mean: float, snapshot: dict) -> None:
        self._means.append(float(mean))
        self._snapshots.append(dict(snapshot))

    def evaluate(self):
        """Returns (should_rollback, best_snapshot_or_None, notice)."""
        decision, best_index = check_rollback(self._means, self.tolerance)
        if not decision:
            return False, None, ""
        best_mean = self._means[best_index]
        notice = (
            f"ROLLBACK: the last window mean {self._means[-1]:.4f} degraded more than "
            f"{self.tolerance:.0%} below the best window mean {best_mean:.4f}; "
            "hyperparameters were restored to that best window. Propose a cautious "
            "corrective adjustment."
        )
        return True, dict(self._snapshots[best_index]), notice
