"""Unit tests for the chat gateway: extraction, backends, prompts, audit."""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from uplinkrl.errors import (
    BackendError,
    ConfigError,
    JsonExtractionError,
    MockExhaustedError,
    SchemaError,
    TransportError,
)
from uplinkrl.llm import (
    AuditLog,
    ChatRequest,
    HttpBackend,
    MockBackend,
    RuleBackend,
    available_templates,
    complete,
    extract_json,
    prompt_hash,
    render_prompt,
    request_json,
)


# -- extract_json ------------------------------------------------------------


def test_extract_json_from_prose():
    text = 'Sure! Here is the candidate: {"reward_expression": "-energy"} Hope it helps.'
    assert extract_json(text) == {"reward_expression": "-energy"}


def test_extract_json_ignores_braces_inside_strings():
    text = 'prefix {"expr": "f({x}) and \\"quoted\\" }{", "n": 1} suffix'
    assert extract_json(text) == {"expr": 'f({x}) and "quoted" }{', "n": 1}


def test_extract_json_nested_objects():
    text = 'noise {"a": {"b": [1, 2, {"c": 3}]}} trailing {"d": 4}'
    assert extract_json(text) == {"a": {"b": [1, 2, {"c": 3}]}}


def test_extract_json_skips_unbalanced_prefix():
    text = "set {broken then the real one: {\"ok\": true}"
    assert extract_json(text) == {"ok": True}


def test_extract_json_failure_carries_raw_text():
    with pytest.raises(JsonExtractionError) as exc_info:
        extract_json("no json here { still not balanced")
    assert exc_info.value.raw_text.startswith("no json here")


def test_extract_json_idempotent_on_printed_object():
    obj = extract_json('x {"k": [1, {"m": "v"}], "s": "a}b"} y')
    assert extract_json(json.dumps(obj)) == obj


# -- ChatRequest -------------------------------------------------------------


def test_chat_request_needs_messages():
    with pytest.raises(ConfigError):
        ChatRequest(messages=[])


def test_chat_request_system_must_lead():
    with pytest.raises(ConfigError):
        ChatRequest(
            messages=[
                {"role": "user", "content": "hi"},
                {"role": "system", "content": "be brief"},
            ]
        )


# -- mock and rule backends --------------------------------------------------


def _req(text="hello"):
    return ChatRequest(messages=[{"role": "user", "content": text}])


def test_mock_backend_replays_in_order_then_exhausts():
    mock = MockBackend(replies=["one", "two"])
    assert mock.complete(_req()) == "one"
    assert mock.complete(_req()) == "two"
    with pytest.raises(MockExhaustedError):
        mock.complete(_req())


def test_mock_backend_keyed_by_prompt_hash():
    req = _req("specific")
    mock = MockBackend(replies=["fallback"], keyed={prompt_hash(req.messages): "keyed"})
    assert mock.complete(req) == "keyed"
    assert mock.complete(_req("other")) == "fallback"


def test_mock_backend_same_request_same_reply_in_keyed_mode():
    req = _req("ping")
    mock = MockBackend(keyed={prompt_hash(req.messages): "pong"})
    assert mock.complete(req) == mock.complete(req) == "pong"


def test_rule_backend_computes_from_request():
    rule = RuleBackend(lambda r: r.messages[-1]["content"].upper())
    assert rule.complete(_req("shout")) == "SHOUT"


# -- request_json ------------------------------------------------------------


def _need_keys(*keys):
    def check(obj):
        missing = [k for k in keys if k not in obj]
        if missing:
            raise SchemaError(f"missing keys: {missing}")

    return check


def test_request_json_happy_path():
    mock = MockBackend(replies=['{"a": 1}'])
    obj, raw = request_json(mock, _req(), _need_keys("a"))
    assert obj == {"a": 1} and raw == '{"a": 1}'


def test_request_json_reprompts_once_then_succeeds():
    mock = MockBackend(replies=["not json at all", 'fixed: {"a": 2}'])
    obj, _ = request_json(mock, _req(), _need_keys("a"))
    assert obj == {"a": 2}


def test_request_json_fails_after_second_bad_reply():
    mock = MockBackend(replies=['{"wrong": 1}', '{"still_wrong": 2}'])
    with pytest.raises(SchemaError):
        request_json(mock, _req(), _need_keys("a"))


# -- prompt templates --------------------------------------------------------


def test_all_four_templates_ship():
    names = available_templates()
    assert set(names) >= {
        "reward_designer",
        "probe_sampler",
        "decision_guider",
        "state_perceiver",
    }


def test_render_prompt_substitutes_and_sets_temperature():
    req = render_prompt(
        "reward_designer",
        {
            "task_description": "keep energy low",
            "feature_list": "- energy\n- penalty",
            "constraints": "- finite everywhere",
        },
    )
    assert req.temperature == 0.7
    assert req.messages[0]["role"] == "system"
    assert "keep energy low" in req.messages[1]["content"]
    assert "$task_description" not in req.messages[1]["content"]

    guider = render_prompt(
        "decision_guider",
        {"report_json": "{}", "whitelist_json": "{}", "rollback_notice": ""},
    )
    assert guider.temperature == 0.0


def test_render_prompt_unknown_template_and_unbound_variable():
    with pytest.raises(ConfigError, match="unknown prompt template"):
        render_prompt("nonexistent", {})
    with pytest.raises(ConfigError, match="task_description"):
        render_prompt("reward_designer", {"feature_list": "x", "constraints": "y"})


def test_rendered_prompts_never_contain_auth_token(monkeypatch):
    token = "sk-super-secret-credential-123"
    monkeypatch.setenv("UPLINKRL_API_KEY", token)
    for name in ("reward_designer", "probe_sampler", "decision_guider", "state_perceiver"):
        req = render_prompt(
            name,
            {
                "task_description": "t",
                "feature_list": "f",
                "constraints": "c",
                "feature_ranges": "r",
                "count": "3",
                "report_json": "{}",
                "whitelist_json": "{}",
                "rollback_notice": "",
                "telemetry_json": "{}",
                "output_dim": "2",
            },
        )
        for msg in req.messages:
            assert token not in msg["content"]


# -- audit log ---------------------------------------------------------------


def test_complete_writes_audit_row(tmp_path):
    audit = AuditLog(tmp_path / "audit.jsonl")
    mock = MockBackend(replies=["fine"])
    req = _req("log me")
    complete(mock, req, audit, kind="unit", template="none")
    rows = audit.rows()
    assert len(rows) == 1
    row = rows[0]
    assert row["kind"] == "unit"
    assert row["backend"] == "mock"
    assert row["prompt_sha256"] == prompt_hash(req.messages)
    assert row["reply_excerpt"] == "fine"


# -- http backend ------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    seen = []
    status = 200
    payload = {"choices": [{"message": {"role": "assistant", "content": "served"}}]}

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        _Handler.seen.append(
            {"path": self.path, "auth": self.headers.get("Authorization"), "body": body}
        )
        data = json.dumps(_Handler.payload).encode()
        self.send_response(_Handler.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def http_server():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _Handler.seen = []
    _Handler.status = 200
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_backend_wire_format(http_server, monkeypatch):
    monkeypatch.setenv("UPLINKRL_API_KEY", "tok123")
    backend = HttpBackend(http_server, retries=0)
    req = ChatRequest(
        messages=[{"role": "user", "content": "ping"}],
        model="m1",
        temperature=0.7,
        max_tokens=64,
    )
    assert backend.complete(req) == "served"
    seen = _Handler.seen[0]
    assert seen["path"] == "/v1/chat/completions"
    assert seen["auth"] == "Bearer tok123"
    assert seen["body"]["model"] == "m1"
    assert seen["body"]["temperature"] == 0.7
    assert seen["body"]["max_tokens"] == 64
    assert seen["body"]["messages"][0]["content"] == "ping"


def test_http_backend_error_status_includes_excerpt(http_server):
    _Handler.status = 500
    backend = HttpBackend(http_server, retries=0)
    with pytest.raises(BackendError, match="500"):
        backend.complete(_req())


def test_http_backend_transport_error_after_retries():
    backend = HttpBackend("http://127.0.0.1:9", retries=1, backoff=0.01)
    with pytest.raises(TransportError, match="2 attempts"):
        backend.complete(_req())
