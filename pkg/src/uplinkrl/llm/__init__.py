"""Chat-completion gateway: backends, prompt rendering, JSON plumbing."""

from .audit import AuditLog, prompt_hash
from .client import (
    ChatRequest,
    HttpBackend,
    MockBackend,
    RuleBackend,
    complete,
    request_json,
)
from .jsonx import extract_json
from .prompts import available_templates, load_template, render_prompt

__all__ = [
    "AuditLog",
    "ChatRequest",
    "HttpBackend",
    "MockBackend",
    "RuleBackend",
    "available_templates",
    "complete",
    "extract_json",
    "load_template",
    "prompt_hash",
    "render_prompt",
    "request_json",
]
