"""Probe-state generation for reward validation.

The LLM path asks a backend for diverse in-range samples; the fallback
is a deterministic rank-1 lattice over the feature box, which also tops
up whenever the backend yields fewer valid samples than requested.
"""

from __future__ import annotations

import json
import math
from typing import Optional

from ..errors import SchemaError
from ..llm import AuditLog, render_prompt, request_json


def _coprime_strides(dims: int, n: int) -> list:
    """Per-dimension strides, all coprime with n, starting at 1."""
    strides = []
    candidate = 1
    for _ in range(dims):
        while math.gcd(candidate, n) != 1:
            candidate += 1
        strides.append(candidate)
        candidate += 1
    return strides


def lattice_grid(ranges: dict, count: int) -> list:
    """Deterministic low-discrepancy grid over a feature box.

    Dimension j visits the same count evenly spaced levels (endpoints
    included) in an order shifted by a stride coprime with count, so any
    prefix spreads across the box. In one dimension this is exactly the
    endpoint-inclusive linspace: count 3 over [0, 1] gives 0, 0.5, 1.
    """
    names = list(ranges)
    if count <= 0:
        return []
    if count == 1:
        return [{k: (lo + hi) / 2.0 for k, (lo, hi) in ranges.items()}]
    strides = _coprime_strides(len(names), count)
    samples = []
    for i in range(count):
        row = {}
        for j, name in enumerate(names):
            lo, hi = ranges[name]
            frac = ((i * strides[j]) % count) / (count - 1)
            row[name] = lo + frac * (hi - lo)
        samples.append(row)
    return samples


def _check_samples(obj: dict) -> None:
    if "samples" not in obj or not isinstance(obj["samples"], list):
        raise SchemaError("reply must contain a 'samples' list")


def _valid_sample(sample, ranges: dict) -> bool:
    if not isinstance(sample, dict):
        return False
    for name, (lo, hi) in ranges.items():
        v = sample.get(name)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            return False
        if not lo <= float(v) <= hi:
            return False
    return True


def generate_probe_samples(
    ranges: dict,
    count: int,
    backend=None,
    audit: Optional[AuditLog] = None,
) -> list:
    """Return exactly `count` in-range probe states.

    With a backend, invalid replies or out-of-range samples are dropped
    and the lattice grid tops the set back up to `count`; without one the
    grid is used directly.
    """
    grid = lattice_grid(ranges, count)
    if backend is None:
        return grid

    request = render_prompt(
        "probe_sampler",
        {
            "feature_ranges": json.dumps({k: list(v) for k, v in ranges.items()}),
            "count": str(count),
        },
    )
    try:
        obj, _ = request_json(
            backend, request, _check_samples, audit, kind="probes", template="probe_sampler"
        )
        raw = obj["samples"]
    except SchemaError:
        raw = []

    kept = []
    for sample in raw:
        if _valid_sample(sample, ranges) and len(kept) < count:
            kept.append({k: float(sample[k]) for k in ranges})
    if len(kept) < count:
        seen = {tuple(sorted(s.items())) for s in kept}
        for g in grid:
            if len(kept) >= count:
                break
            key = tuple(sorted(g.items()))
            if key not in seen:
                kept.append(g)
                seen.add(key)
    return kept[:count]
