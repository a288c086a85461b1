"""Extraction of JSON objects from free-form model replies.

Models wrap JSON in prose, markdown fences, or stray tokens; we scan for
the first balanced top-level object, honoring string literals and escape
sequences, and hand the slice to the stdlib parser.
"""

from __future__ import annotations

import json

from ..errors import JsonExtractionError


def extract_json(text: str) -> dict:
    """Return the first complete JSON object embedded in `text`.

    Raises JsonExtractionError (carrying the raw text) when no balanced
    object exists or the balanced slice fails to parse.
    """
    start = text.find("{")
    while start != -1:
        end = _scan_balanced(text, start)
        if end is not None:
            candidate = text[start : end + 1]
            try:
                obj = json.loads(candidate)
            except json.JSONDecodeError:
                obj = None
            if isinstance(obj, dict):
                return obj
        start = text.find("{", start + 1)
    raise JsonExtractionError("no parseable JSON object in reply", raw_text=text)


def _scan_balanced(text: str, start: int):
    """Index of the brace closing the object opened at `start`, or None."""
    level = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            level += 1
        elif ch == "}":
            level -= 1
            if level == 0:
                return i
    return None
