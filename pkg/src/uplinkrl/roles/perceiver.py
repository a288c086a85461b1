"""State-perceiver role: telemetry record -> fixed-size feature vector.

The deterministic path (no backend) summarizes the record's numeric
fields, in sorted key order, as [mean, max, min, std, sum], truncated or
zero-padded to the requested width and squashed through tanh so every
entry lands in (-1, 1). The LLM path asks for the vector directly and
falls back to the deterministic summary on an unusable reply.
"""

from __future__ import annotations

import json
import logging
from typing import Optional

import numpy as np

from ..errors import SchemaError
from ..llm import AuditLog, render_prompt, request_json

log = logging.getLogger(__name__)


def _numeric_fields(record: dict) -> list:
    values = []
    for key in sorted(record):
        v = record[key]
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            values.append(float(v))
    return values


def summary_features(record: dict, output_dim: int) -> np.ndarray:
    """Deterministic telemetry summary (the mock perception path)."""
    values = _numeric_fields(record)
    if values:
        arr = np.asarray(values)
        stats = [
            float(arr.mean()),
            float(arr.max()),
            float(arr.min()),
            float(arr.std()),
            float(arr.sum()),
        ]
    else:
        stats = []
    out = np.zeros(output_dim)
    take = min(output_dim, len(stats))
    out[:take] = np.tanh(stats[:take])
    return out


def perceive(
    telemetry,
    output_dim: int,
    backend=None,
    audit: Optional[AuditLog] = None,
) -> np.ndarray:
    """Compress one telemetry record into `output_dim` values in [-1, 1].

    `telemetry` may be a dict or a JSON object string.
    """
    record = json.loads(telemetry) if isinstance(telemetry, str) else dict(telemetry)
    if backend is None:
        return summary_features(record, output_dim)

    def check(obj: dict) -> None:
        feats = obj.get("features")
        if not isinstance(feats, list) or len(feats) != output_dim:
            raise SchemaError(f"'features' must be a list of exactly {output_dim} numbers")
        for v in feats:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise SchemaError("'features' entries must be numbers")
            if not -1.0 <= float(v) <= 1.0:
                raise SchemaError("'features' entries must lie in [-1, 1]")

    request = render_prompt(
        "state_perceiver",
        {"telemetry_json": json.dumps(record, sort_keys=True), "output_dim": str(output_dim)},
    )
    try:
        obj, _ = request_json(
            backend, request, check, audit, kind="perceive", template="state_perceiver"
        )
    except SchemaError as exc:
        log.warning("perceiver reply unusable, using summary fallback: %s", exc)
        return summary_features(record, output_dim)
    return np.asarray([float(v) for v in obj["features"]])
