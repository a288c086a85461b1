"""Chat-completion backends and the JSON-reply request helper.

Three backend kinds share the `complete(request) -> str` interface:
HttpBackend speaks the common chat-completions wire format, MockBackend
replays canned replies for tests, RuleBackend computes a reply from the
prompt (used for scripted guidance).
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from ..errors import (
    BackendError,
    ConfigError,
    JsonExtractionError,
    MockExhaustedError,
    SchemaError,
    TransportError,
)
from .audit import AuditLog, prompt_hash
from .jsonx import extract_json


@dataclass
class ChatRequest:
    """One chat call: messages plus sampling settings."""

    messages: list
    model: str = "local-default"
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 30.0

    def __post_init__(self):
        if not self.messages:
            raise ConfigError("a chat request needs at least one message")
        roles = [m.get("role") for m in self.messages]
        if "system" in roles and roles[0] != "system":
            raise ConfigError("the system message must come first")

    def with_followup(self, assistant_reply: str, user_text: str) -> "ChatRequest":
        msgs = list(self.messages)
        msgs.append({"role": "assistant", "content": assistant_reply})
        msgs.append({"role": "user", "content": user_text})
        return ChatRequest(
            messages=msgs,
            model=self.model,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            timeout=self.timeout,
        )


class MockBackend:
    """Canned replies, consumed in order or looked up by prompt hash."""

    name = "mock"

    def __init__(self, replies=None, keyed=None):
        self._replies = list(replies or [])
        self._keyed = dict(keyed or {})
        self._cursor = 0
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        key = prompt_hash(request.messages)
        if key in self._keyed:
            return self._keyed[key]
        with self._lock:
            if self._cursor >= len(self._replies):
                raise MockExhaustedError(
                    f"mock backend exhausted after {len(self._replies)} replies"
                )
            reply = self._replies[self._cursor]
            self._cursor += 1
        return reply


class RuleBackend:
    """Reply computed from the request by a deterministic function."""

    name = "rule"

    def __init__(self, fn: Callable[[ChatRequest], str]):
        self._fn = fn

    def complete(self, request: ChatRequest) -> str:
        return self._fn(request)


class HttpBackend:
    """POSTs to {base_url}/v1/chat/completions with bearer auth.

    The token is read from `auth_env` at call time and placed only in the
    Authorization header, never in message bodies. Transport failures are
    retried with exponential backoff up to `retries` extra attempts.
    """

    name = "http"

    def __init__(
        self,
        base_url: str,
        auth_env: str = "UPLINKRL_API_KEY",
        retries: int = 2,
        backoff: float = 0.5,
        session: Optional[requests.Session] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.auth_env = auth_env
        self.retries = int(retries)
        self.backoff = float(backoff)
        self._session = session or requests.Session()

    def complete(self, request: ChatRequest) -> str:
        url = f"{self.base_url}/v1/chat/completions"
        body = {
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {}
        token = os.environ.get(self.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"

        last_exc = None
        for attempt in range(self.retries + 1):
            try:
                resp = self._session.post(url, json=body, headers=headers, timeout=request.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                if attempt < self.retries:
                    time.sleep(self.backoff * (2.0**attempt))
                continue
            if not 200 <= resp.status_code < 300:
                raise BackendError(
                    f"chat endpoint returned {resp.status_code}: {resp.text[:200]}"
                )
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise BackendError(f"malformed completion payload: {exc}") from exc
        raise TransportError(
            f"transport failed after {self.retries + 1} attempts: {last_exc}"
        )


def complete(backend, request: ChatRequest, audit: Optional[AuditLog] = None, *, kind="chat", template=None) -> str:
    """Run one chat call, recording it in the audit log when given."""
    reply = backend.complete(request)
    if audit is not None:
        audit.record(
            kind=kind,
            backend=getattr(backend, "name", type(backend).__name__),
            messages=request.messages,
            reply=reply,
            template=template,
        )
    return reply


def request_json(
    backend,
    request: ChatRequest,
    check: Optional[Callable[[dict], None]] = None,
    audit: Optional[AuditLog] = None,
    *,
    kind: str = "chat",
    template=None,
):
    """complete() plus JSON extraction and schema checking.

    On an unextractable or schema-invalid reply, re-prompts once with the
    failure appended; a second failure raises SchemaError. Returns
    (parsed_object, raw_reply).
    """
    reply = complete(backend, request, audit, kind=kind, template=template)
    for attempt in range(2):
        try:
            obj = extract_json(reply)
            if check is not None:
                check(obj)
            return obj, reply
        except (JsonExtractionError, SchemaError) as exc:
            if attempt == 1:
                raise SchemaError(f"reply failed schema check after re-prompt: {exc}") from exc
            retry_req = request.with_followup(
                reply,
                f"Your previous reply was not usable: {exc}. "
                "Reply again with exactly one JSON object matching the requested schema.",
            )
            reply = complete(backend, retry_req, audit, kind=f"{kind}-retry", template=template)
    raise AssertionError("unreachable")
