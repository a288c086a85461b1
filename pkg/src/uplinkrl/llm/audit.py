"""Append-only JSONL audit trail of model calls."""

from __future__ import annotations

import hashlib
import json
import threading
import time
from pathlib import Path


def prompt_hash(messages) -> str:
    """Stable digest of a message list (role/content pairs only)."""
    canon = json.dumps(
        [[m["role"], m["content"]] for m in messages], ensure_ascii=False
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class AuditLog:
    """One JSON object per line; safe for concurrent writers in-process."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def record(self, *, kind: str, backend: str, messages, reply: str, template=None, extra=None):
        row = {
            "ts": round(time.time(), 3),
            "kind": kind,
            "backend": backend,
            "template": template,
            "prompt_sha256": prompt_hash(messages),
            "reply_excerpt": reply[:200],
        }
        if extra:
            row.update(extra)
        line = json.dumps(row, ensure_ascii=False)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def rows(self):
        if not self.path.exists():
            return []
        with self.path.open(encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
