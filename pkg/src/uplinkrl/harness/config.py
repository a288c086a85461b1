"""Experiment configuration: a flat JSON file maps onto one dataclass."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import ConfigError

ENVS = ("uav", "sagin")
AGENTS = ("dqn", "ddpg", "td3", "tqc")
REWARD_MODES = ("manual", "scripted-enriched", "llm-designed")
GUIDANCE_MODES = ("off", "scripted", "llm")


@dataclass
class ExperimentConfig:
    env: str
    agent: str
    episodes: int
    seeds: tuple = (0,)
    reward_mode: str = "manual"
    guidance: str = "off"
    label: str = ""
    out_dir: str = "runs/experiment"
    train_every: int = 1
    warmup_steps: int = 0  # 0 means one batch worth of random actions
    exploration0: float = 1.0  # initial epsilon / noise fraction
    exploration_decay: float = 0.7  # fraction of the run spent decaying
    guidance_interval: int = 10
    design_expression: str = ""  # pre-designed reward source, skips the designer
    task_description: str = "Minimize total energy spent per episode."
    design_constraints: str = "Reward must decrease as the energy feature grows."
    backend: dict = field(default_factory=lambda: {"kind": "mock"})
    env_kwargs: dict = field(default_factory=dict)
    agent_kwargs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.env not in ENVS:
            raise ConfigError(f"env must be one of {ENVS}, got {self.env!r}")
        if self.agent not in AGENTS:
            raise ConfigError(f"agent must be one of {AGENTS}, got {self.agent!r}")
        if self.reward_mode not in REWARD_MODES:
            raise ConfigError(
                f"reward_mode must be one of {REWARD_MODES}, got {self.reward_mode!r}"
            )
        if self.guidance not in GUIDANCE_MODES:
            raise ConfigError(
                f"guidance must be one of {GUIDANCE_MODES}, got {self.guidance!r}"
            )
        if self.episodes <= 0:
            raise ConfigError("episodes must be positive")
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.train_every < 1 or self.guidance_interval < 1:
            raise ConfigError("train_every and guidance_interval must be >= 1")
        if self.reward_mode != "manual" and self.env != "uav":
            raise ConfigError("reward overrides are defined for the uav env only")
        if not isinstance(self.backend, dict) or "kind" not in self.backend:
            raise ConfigError("backend must be an object with a 'kind' key")
        if self.backend["kind"] not in ("mock", "http"):
            raise ConfigError(f"backend kind must be mock or http, got {self.backend['kind']!r}")
        if self.backend["kind"] == "http" and not self.backend.get("base_url"):
            raise ConfigError("an http backend needs base_url")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(f"bad config {path}: {exc}")
