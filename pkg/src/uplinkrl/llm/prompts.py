"""Prompt template loading and rendering.

Templates ship with the package as versioned text files (name.v<n>.txt),
split into a system block and a user block by a ===USER=== line. All
substitution is explicit $variable replacement; an unbound variable is a
configuration error, and nothing else (in particular no credential) is
ever interpolated.
"""

from __future__ import annotations

import re
import string
from importlib import resources

from ..errors import ConfigError
from .client import ChatRequest

_SEPARATOR = "===USER==="

# sampling temperature per role: generative roles explore, analytic roles don't
_TEMPERATURES = {
    "reward_designer": 0.7,
    "probe_sampler": 0.7,
    "decision_guider": 0.0,
    "state_perceiver": 0.0,
}


def _template_dir():
    return resources.files("uplinkrl.llm") / "templates"


def available_templates() -> dict:
    """Map of template name -> newest version number."""
    out: dict = {}
    for entry in _template_dir().iterdir():
        m = re.fullmatch(r"(?P<name>[a-z_]+)\.v(?P<ver>\d+)\.txt", entry.name)
        if m:
            name, ver = m.group("name"), int(m.group("ver"))
            out[name] = max(out.get(name, 0), ver)
    return out


def load_template(name: str, version=None) -> tuple:
    """Return (system_text, user_text, version) for a template name."""
    versions = available_templates()
    if name not in versions:
        raise ConfigError(f"unknown prompt template {name!r}; have {sorted(versions)}")
    ver = version if version is not None else versions[name]
    path = _template_dir() / f"{name}.v{ver}.txt"
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"template {name!r} has no version {ver}") from None
    if _SEPARATOR not in raw:
        raise ConfigError(f"template {name!r} lacks the {_SEPARATOR} separator")
    system_text, user_text = raw.split(_SEPARATOR, 1)
    return system_text.strip(), user_text.strip(), ver


def render_prompt(name: str, variables: dict, *, model: str = "local-default", max_tokens: int = 1024) -> ChatRequest:
    """Render a template into a ready-to-send ChatRequest."""
    system_text, user_text, _ = load_template(name)
    try:
        user_filled = string.Template(user_text).substitute(variables)
        system_filled = string.Template(system_text).substitute(variables)
    except KeyError as exc:
        raise ConfigError(f"template {name!r}: unbound variable {exc.args[0]!r}") from None
    return ChatRequest(
        messages=[
            {"role": "system", "content": system_filled},
            {"role": "user", "content": user_filled},
        ],
        model=model,
        temperature=_TEMPERATURES.get(name, 0.0),
        max_tokens=max_tokens,
    )
